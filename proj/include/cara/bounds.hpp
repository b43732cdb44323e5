#pragma once
#include <vector>

#include "cara/model.hpp"
#include "cara/targets.hpp"

namespace cara {

// Treatment probability per stratum, each strictly inside (0, 1).
struct AllocationMap {
  std::vector<double> pi;
};

// Asymptotic variance of the stratified difference-in-means under allocation
// `alloc`, which is the efficiency bound when `alloc` solves the constrained
// problem:
//   sum_x p(x) { var1(x)/pi(x) + var0(x)/(1-pi(x)) } + Var{mu(X,1) - mu(X,0)}.
// The result is on the sqrt(n) scale; divide by n for a finite-trial variance.
// Throws DomainError when an entry is not inside (0, 1) or sizes disagree.
double efficiency_bound(const MomentTable& moments, const AllocationMap& alloc);
double efficiency_bound(const PopulationSpec& pop, const AllocationMap& alloc);

// Var{mu(X,1) - mu(X,0)} over strata probabilities.
double effect_heterogeneity(const MomentTable& moments);

struct ConstraintBound {
  double bound = 0.0;
  AllocationMap alloc;
  std::vector<bool> active;
};

// Applies constrained_optimal with the same c in every stratum, then evaluates
// the bound. Infeasible strata raise InfeasibleError naming the stratum.
ConstraintBound bound_for_constraint(const MomentTable& moments, double c,
                                     double clip_eps = kDefaultClipEps);
ConstraintBound bound_for_constraint(const PopulationSpec& pop, double c,
                                     double clip_eps = kDefaultClipEps);

}  // namespace cara
