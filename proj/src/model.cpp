#include "cara/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cara/errors.hpp"

namespace cara {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// E[T] for T ~ t(df, ncp): ncp * sqrt(df/2) * Gamma((df-1)/2) / Gamma(df/2).
double noncentral_t_mean(double df, double ncp) {
  const double log_ratio = std::lgamma((df - 1.0) / 2.0) - std::lgamma(df / 2.0);
  return ncp * std::sqrt(df / 2.0) * std::exp(log_ratio);
}

}  // namespace

double ArmMoments::sd1() const { return std::sqrt(var1); }
double ArmMoments::sd0() const { return std::sqrt(var0); }

void validate(const ArmMoments& theta) {
  const bool finite = std::isfinite(theta.mu1) && std::isfinite(theta.mu0) &&
                      std::isfinite(theta.var1) && std::isfinite(theta.var0);
  if (!finite || theta.var1 < 0.0 || theta.var0 < 0.0) {
    throw DomainError("arm moments must be finite with nonnegative variances");
  }
}

std::string describe(const OutcomeDist& d) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const NoncentralT& t) {
                   os << t.scale << "*t(" << t.df << "," << t.noncentrality << ")+" << t.shift;
                 },
                 [&](const Bernoulli& b) { os << "Bernoulli(" << b.p << ")"; },
                 [&](const PointMass& m) { os << "PointMass(" << m.value << ")"; },
             },
             d);
  return os.str();
}

Moments dist_moments(const OutcomeDist& d) {
  return std::visit(
      overloaded{
          [](const NoncentralT& t) -> Moments {
            if (!(t.df > 2.0)) {
              throw InfiniteVarianceError("non-central t needs df > 2 for a finite variance");
            }
            if (!std::isfinite(t.scale) || !std::isfinite(t.shift) ||
                !std::isfinite(t.noncentrality)) {
              throw DomainError("non-central t parameters must be finite");
            }
            const double m = noncentral_t_mean(t.df, t.noncentrality);
            const double second = t.df * (1.0 + t.noncentrality * t.noncentrality) / (t.df - 2.0);
            const double var = std::max(0.0, second - m * m);
            return {t.scale * m + t.shift, t.scale * t.scale * var};
          },
          [](const Bernoulli& b) -> Moments {
            if (!(b.p >= 0.0 && b.p <= 1.0)) throw DomainError("Bernoulli p must lie in [0, 1]");
            return {b.p, b.p * (1.0 - b.p)};
          },
          [](const PointMass& m) -> Moments {
            if (!std::isfinite(m.value)) throw DomainError("point mass must be finite");
            return {m.value, 0.0};
          },
      },
      d);
}

PopulationSpec::PopulationSpec(std::vector<double> strata_probs, std::vector<ArmPair> outcomes)
    : probs_(std::move(strata_probs)), outcomes_(std::move(outcomes)) {
  if (probs_.empty()) throw DomainError("population needs at least one stratum");
  if (outcomes_.size() != probs_.size()) {
    throw DomainError("outcome table must have one (arm0, arm1) entry per stratum");
  }
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("stratum probabilities must lie in [0, 1]");
  }
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("stratum probabilities must sum to 1");
}

void PopulationSpec::check(StratumId x) const {
  if (x.index() >= probs_.size()) throw DomainError("stratum id out of range");
}

double PopulationSpec::prob(StratumId x) const {
  check(x);
  return probs_[x.index()];
}

const OutcomeDist& PopulationSpec::outcome(StratumId x, Arm w) const {
  check(x);
  return outcomes_[x.index()][arm_index(w)];
}

ArmMoments stratum_moments(const PopulationSpec& pop, StratumId x) {
  const Moments m1 = dist_moments(pop.outcome(x, Arm::treatment));
  const Moments m0 = dist_moments(pop.outcome(x, Arm::control));
  return {m1.mean, m1.variance, m0.mean, m0.variance};
}

ArmMoments pool_moments(const PopulationSpec& pop) {
  if (pop.num_strata() == 1) return stratum_moments(pop, StratumId{0});
  double mean1 = 0.0, second1 = 0.0, mean0 = 0.0, second0 = 0.0;
  for (std::uint32_t x = 0; x < pop.num_strata(); ++x) {
    const double p = pop.prob(StratumId{x});
    const ArmMoments m = stratum_moments(pop, StratumId{x});
    mean1 += p * m.mu1;
    second1 += p * (m.var1 + m.mu1 * m.mu1);
    mean0 += p * m.mu0;
    second0 += p * (m.var0 + m.mu0 * m.mu0);
  }
  return {mean1, std::max(0.0, second1 - mean1 * mean1), mean0,
          std::max(0.0, second0 - mean0 * mean0)};
}

MomentTable stratified_moments(const PopulationSpec& pop) {
  MomentTable t;
  t.probs = pop.strata_probs();
  for (std::uint32_t x = 0; x < pop.num_strata(); ++x) {
    t.strata.push_back(stratum_moments(pop, StratumId{x}));
  }
  return t;
}

MomentTable pooled_moments(const PopulationSpec& pop) {
  return MomentTable{{1.0}, {pool_moments(pop)}};
}

PopulationSpec continuous_three_strata_model() {
  auto t5 = [](double scale, double shift, double ncp) {
    return OutcomeDist{NoncentralT{scale, shift, 5.0, ncp}};
  };
  std::vector<PopulationSpec::ArmPair> outcomes = {
      {t5(2.0, 0.0, 1.0), t5(1.0, 20.0, 1.0)},
      {t5(1.0, 10.0, 2.0), t5(3.0, 20.0, 2.0)},
      {t5(4.0, 0.0, 3.0), t5(1.0, 20.0, 3.0)},
  };
  return PopulationSpec({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, std::move(outcomes));
}

PopulationSpec binary_two_strata_model(std::vector<double> strata_probs) {
  std::vector<PopulationSpec::ArmPair> outcomes = {
      {Bernoulli{0.5}, Bernoulli{0.9}},
      {Bernoulli{0.5}, Bernoulli{0.5}},
  };
  return PopulationSpec(std::move(strata_probs), std::move(outcomes));
}

}  // namespace cara
