#pragma once
#include "cara/arm_estimate.hpp"
#include "cara/trial_state.hpp"

namespace cara {

// Pooled difference in arm means. Throws EstimationError if an arm is empty.
double dim_estimate(const TrialState& state);

// sum_x (n(x)/n) {mu_hat(x,1) - mu_hat(x,0)} over strata present in the trial.
// Throws EstimationError if a present stratum has an empty arm.
double stratified_dim_estimate(const TrialState& state);

// Sample analogue of the asymptotic S-DIM variance:
//   sum_x (n(x)/n) { s2(x,1) / (n(x,1)/n(x)) + s2(x,0) / (n(x,0)/n(x)) }
//   + sum_x (n(x)/n) (gap_x - mean gap)^2.
// Needs two subjects per arm in every present stratum.
double plug_in_variance(const TrialState& state);

}  // namespace cara
