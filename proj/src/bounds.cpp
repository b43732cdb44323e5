#include "cara/bounds.hpp"

#include <string>

#include "cara/errors.hpp"

namespace cara {

double effect_heterogeneity(const MomentTable& moments) {
  double mean_gap = 0.0;
  for (std::size_t x = 0; x < moments.size(); ++x) {
    mean_gap += moments.probs[x] * (moments.strata[x].mu1 - moments.strata[x].mu0);
  }
  double var = 0.0;
  for (std::size_t x = 0; x < moments.size(); ++x) {
    const double d = moments.strata[x].mu1 - moments.strata[x].mu0 - mean_gap;
    var += moments.probs[x] * d * d;
  }
  return var;
}

double efficiency_bound(const MomentTable& moments, const AllocationMap& alloc) {
  if (alloc.pi.size() != moments.size()) {
    throw DomainError("allocation map must cover every stratum");
  }
  double within = 0.0;
  for (std::size_t x = 0; x < moments.size(); ++x) {
    const double pi = alloc.pi[x];
    if (!(pi > 0.0 && pi < 1.0)) throw DomainError("allocation must lie strictly inside (0, 1)");
    const ArmMoments& m = moments.strata[x];
    within += moments.probs[x] * (m.var1 / pi + m.var0 / (1.0 - pi));
  }
  return within + effect_heterogeneity(moments);
}

double efficiency_bound(const PopulationSpec& pop, const AllocationMap& alloc) {
  return efficiency_bound(stratified_moments(pop), alloc);
}

ConstraintBound bound_for_constraint(const MomentTable& moments, double c, double clip_eps) {
  ConstraintBound out;
  for (std::size_t x = 0; x < moments.size(); ++x) {
    try {
      const TargetValue t = constrained_optimal(moments.strata[x], c, clip_eps);
      out.alloc.pi.push_back(t.rho);
      out.active.push_back(t.active);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("stratum " + std::to_string(x + 1) + ": " + e.what());
    }
  }
  out.bound = efficiency_bound(moments, out.alloc);
  return out;
}

ConstraintBound bound_for_constraint(const PopulationSpec& pop, double c, double clip_eps) {
  return bound_for_constraint(stratified_moments(pop), c, clip_eps);
}

}  // namespace cara
