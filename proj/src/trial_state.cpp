#include "cara/trial_state.hpp"

#include "cara/errors.hpp"

namespace cara {

TrialState::TrialState(std::size_t num_strata)
    : strata_count_(num_strata, 0), estimates_(num_strata) {
  if (num_strata == 0) throw DomainError("trial needs at least one stratum");
}

void TrialState::record(StratumId x, Arm w, double y) {
  if (x.index() >= num_strata()) throw DomainError("stratum id out of range");
  ++strata_count_[x.index()];
  auto& est = estimates_[x.index()][arm_index(w)];
  est = update_estimate(est, y);
  ++arm_total_[arm_index(w)];
  strata_.push_back(x.value);
  arms_.push_back(static_cast<std::uint8_t>(w));
  outcomes_.push_back(y);
}

ArmMoments TrialState::estimated_moments(StratumId x) const {
  const auto& e1 = estimate(x, Arm::treatment);
  const auto& e0 = estimate(x, Arm::control);
  return {e1.mean, e1.variance_or_zero(), e0.mean, e0.variance_or_zero()};
}

void TrialState::reserve(std::size_t n) {
  strata_.reserve(n);
  arms_.reserve(n);
  outcomes_.reserve(n);
}

}  // namespace cara
