#pragma once
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cara/arm_estimate.hpp"
#include "cara/model.hpp"

namespace cara {

// Counters, running per-arm moments and the aligned (X, W, Y) history of one
// simulated trial. Strata here are the strata the design observes.
class TrialState {
 public:
  explicit TrialState(std::size_t num_strata);

  // Throws DomainError for an out-of-range stratum.
  void record(StratumId x, Arm w, double y);

  std::size_t size() const { return outcomes_.size(); }
  std::size_t num_strata() const { return strata_count_.size(); }

  std::size_t stratum_count(StratumId x) const { return strata_count_.at(x.index()); }
  std::size_t arm_count(StratumId x, Arm w) const { return estimate(x, w).count; }
  std::size_t total_arm_count(Arm w) const { return arm_total_[arm_index(w)]; }
  const ArmEstimate& estimate(StratumId x, Arm w) const {
    return estimates_.at(x.index())[arm_index(w)];
  }
  // Current plug-in theta for stratum x; variances are 0 below two observations.
  ArmMoments estimated_moments(StratumId x) const;

  std::span<const std::uint32_t> strata() const { return strata_; }
  std::span<const std::uint8_t> arms() const { return arms_; }
  std::span<const double> outcomes() const { return outcomes_; }

  void reserve(std::size_t n);

 private:
  std::vector<std::size_t> strata_count_;
  std::vector<std::array<ArmEstimate, 2>> estimates_;
  std::array<std::size_t, 2> arm_total_{0, 0};
  std::vector<std::uint32_t> strata_;
  std::vector<std::uint8_t> arms_;
  std::vector<double> outcomes_;
};

}  // namespace cara
