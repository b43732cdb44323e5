#pragma once
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cara/dgp.hpp"
#include "cara/model.hpp"
#include "cara/randomizers.hpp"

namespace cara {

enum class Estimator : std::uint8_t { dim, sdim };

const char* estimator_name(Estimator e);

struct ScenarioConfig {
  std::string id = "scenario";
  PopulationSpec pop = continuous_three_strata_model();
  RandomizerSpec randomizer = CompleteRandomization{};
  std::vector<Estimator> estimators{Estimator::dim, Estimator::sdim};
  std::size_t n = 500;
  std::size_t reps = 10000;
  std::uint64_t base_seed = 1;
  double constraint_c = kInf;
  bool observe_x = true;
  std::size_t workers = 1;  // 0 = hardware concurrency
  std::string config_echo;  // source text the scenario came from, for provenance
};

// Throws DomainError on reps == 0, n == 0, no estimators, or an invalid randomizer.
void validate(const ScenarioConfig& cfg);

struct ReplicationResult {
  std::size_t rep_index = 0;
  bool ok = true;
  std::string failure;
  std::vector<double> estimates;       // aligned with cfg.estimators
  double mean_outcome = 0.0;           // c~ over all subjects
  std::vector<double> stratum_mean;    // c~_x per design stratum (NaN if empty)
  std::vector<std::size_t> stratum_n;  // n(x)
  std::vector<double> allocation;      // n(x,1)/n(x) (NaN if empty)
};

// Deterministic in (cfg.base_seed, rep_index).
ReplicationResult run_replication(const ScenarioConfig& cfg, std::size_t rep_index);

struct EstimatorSummary {
  Estimator estimator = Estimator::dim;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;         // across replications (n-1 denominator)
  double scaled_variance = 0.0;  // n * variance, comparable with the asymptotic bound
};

struct SummaryReport {
  std::string scenario_id;
  std::string randomizer;
  double constraint_c = kInf;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t ok_reps = 0;
  std::size_t failed = 0;
  bool invalid = false;    // more than 1% of replications failed
  bool low_power = false;  // fewer than two successful replications
  std::uint64_t base_seed = 0;
  bool observe_x = true;
  ScenarioTruth truth;
  double bound_per_trial = 0.0;  // truth.bound / n, the tables' Bound column
  std::vector<EstimatorSummary> estimators;
  double mean_outcome = 0.0;
  std::vector<double> stratum_mean_outcome;
  std::vector<double> mean_allocation;
  std::string config_echo;
  std::string generated_at;

  const EstimatorSummary* find(Estimator e) const;
};

// Runs all replications (in parallel when cfg.workers != 1) and reduces them in
// replication order, so the numbers do not depend on the worker count.
// `per_rep`, when given, receives every ReplicationResult in index order.
SummaryReport run_scenario(const ScenarioConfig& cfg,
                           std::vector<ReplicationResult>* per_rep = nullptr);

std::size_t default_workers();

}  // namespace cara
