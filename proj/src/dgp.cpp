#include "cara/dgp.hpp"

#include <cmath>
#include <random>

#include "cara/errors.hpp"

namespace cara {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double sample_outcome(const OutcomeDist& dist, Rng& rng) {
  return std::visit(
      overloaded{
          [&](const NoncentralT& t) {
            const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
            const double v = std::gamma_distribution<double>(t.df / 2.0, 2.0)(rng);
            return t.scale * (z + t.noncentrality) / std::sqrt(v / t.df) + t.shift;
          },
          [&](const Bernoulli& b) { return bernoulli_draw(rng, b.p) ? 1.0 : 0.0; },
          [&](const PointMass& m) { return m.value; },
      },
      dist);
}

double sample_outcome(const PopulationSpec& pop, StratumId x, Arm w, Rng& rng) {
  return sample_outcome(pop.outcome(x, w), rng);
}

double true_ate(const PopulationSpec& pop) {
  double tau = 0.0;
  for (std::uint32_t x = 0; x < pop.num_strata(); ++x) {
    const ArmMoments m = stratum_moments(pop, StratumId{x});
    tau += pop.prob(StratumId{x}) * (m.mu1 - m.mu0);
  }
  return tau;
}

ScenarioTruth scenario_truth(const PopulationSpec& pop, const MomentTable& moments,
                             const AllocationTargetSpec& target, double c) {
  ScenarioTruth truth;
  truth.true_ate = true_ate(pop);
  for (const ArmMoments& m : moments.strata) {
    const double rho = evaluate_target(target, m).rho;
    truth.targets.push_back(rho);
    truth.expected_outcome.push_back(rho * m.mu1 + (1.0 - rho) * m.mu0);
  }
  truth.design_variance = efficiency_bound(moments, AllocationMap{truth.targets});
  const ConstraintBound optimum = bound_for_constraint(moments, c, target.clip_eps);
  truth.bound = optimum.bound;
  truth.optimal_alloc = optimum.alloc.pi;
  truth.active = optimum.active;
  return truth;
}

ScenarioTruth scenario_truth(const PopulationSpec& pop, const AllocationTargetSpec& target,
                             double c, bool observe_x) {
  return scenario_truth(pop, moment_table(pop, observe_x), target, c);
}

}  // namespace cara
