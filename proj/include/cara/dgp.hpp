#pragma once
#include <vector>

#include "cara/bounds.hpp"
#include "cara/model.hpp"
#include "cara/rng.hpp"
#include "cara/targets.hpp"

namespace cara {

// One draw of Y(w) given X = x. Non-central t uses (Z + delta) / sqrt(V / df)
// with V ~ Gamma(df/2, 2) (chi-square), then the affine transform.
double sample_outcome(const OutcomeDist& dist, Rng& rng);
double sample_outcome(const PopulationSpec& pop, StratumId x, Arm w, Rng& rng);

// tau = sum_x p(x) {mu(x,1) - mu(x,0)} from analytic moments.
double true_ate(const PopulationSpec& pop);

// Ground truth attached to every report row.
struct ScenarioTruth {
  double true_ate = 0.0;
  std::vector<double> targets;            // rho_x of the design's rule at the true moments
  std::vector<double> expected_outcome;   // rho_x mu(x,1) + (1 - rho_x) mu(x,0)
  double design_variance = 0.0;           // asymptotic S-DIM variance at `targets`
  double bound = 0.0;                     // efficiency bound under the constraint c
  std::vector<double> optimal_alloc;      // allocation attaining `bound`
  std::vector<bool> active;               // per-stratum constraint activity at the optimum
};

// `moments` is the view the design observes (stratified or pooled). The
// bound always uses the constrained-optimal allocation for `c`, whatever the
// design's own rule.
ScenarioTruth scenario_truth(const PopulationSpec& pop, const MomentTable& moments,
                             const AllocationTargetSpec& target, double c);
ScenarioTruth scenario_truth(const PopulationSpec& pop, const AllocationTargetSpec& target,
                             double c, bool observe_x = true);

}  // namespace cara
