#include "cara/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <thread>

#include "cara/errors.hpp"
#include "cara/estimation.hpp"

namespace cara {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Mean and (n-1) variance over the finite entries of `xs`.
std::pair<double, double> mean_and_variance(const std::vector<double>& xs) {
  double mean = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    if (!std::isfinite(x)) continue;
    ++k;
    mean += (x - mean) / static_cast<double>(k);
  }
  if (k < 2) return {k == 0 ? kNaN : mean, 0.0};
  double ss = 0.0;
  for (double x : xs) {
    if (std::isfinite(x)) ss += (x - mean) * (x - mean);
  }
  return {mean, ss / static_cast<double>(k - 1)};
}

}  // namespace

const char* estimator_name(Estimator e) { return e == Estimator::dim ? "dim" : "sdim"; }

std::size_t default_workers() {
  if (const char* env = std::getenv("CARA_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.reps == 0) throw DomainError("scenario '" + cfg.id + "': reps must be >= 1");
  if (cfg.n == 0) throw DomainError("scenario '" + cfg.id + "': n must be >= 1");
  if (cfg.estimators.empty()) throw DomainError("scenario '" + cfg.id + "': no estimators");
  validate(cfg.randomizer);
}

const EstimatorSummary* SummaryReport::find(Estimator e) const {
  for (const auto& s : estimators) {
    if (s.estimator == e) return &s;
  }
  return nullptr;
}

ReplicationResult run_replication(const ScenarioConfig& cfg, std::size_t rep_index) {
  ReplicationResult r;
  r.rep_index = rep_index;
  Rng rng = make_stream(cfg.base_seed, rep_index);
  const TrialState state = run_trial(cfg.randomizer, cfg.pop, cfg.n, rng, cfg.observe_x);

  const std::size_t k = state.num_strata();
  r.stratum_mean.assign(k, kNaN);
  r.stratum_n.assign(k, 0);
  r.allocation.assign(k, kNaN);
  double total = 0.0;
  for (std::uint32_t x = 0; x < k; ++x) {
    const StratumId sid{x};
    const std::size_t nx = state.stratum_count(sid);
    r.stratum_n[x] = nx;
    if (nx == 0) continue;
    const auto& e1 = state.estimate(sid, Arm::treatment);
    const auto& e0 = state.estimate(sid, Arm::control);
    const double sum = e1.mean * static_cast<double>(e1.count) + e0.mean * static_cast<double>(e0.count);
    total += sum;
    r.stratum_mean[x] = sum / static_cast<double>(nx);
    r.allocation[x] = static_cast<double>(e1.count) / static_cast<double>(nx);
  }
  r.mean_outcome = total / static_cast<double>(state.size());

  try {
    for (Estimator e : cfg.estimators) {
      r.estimates.push_back(e == Estimator::dim ? dim_estimate(state)
                                                : stratified_dim_estimate(state));
    }
  } catch (const EstimationError& err) {
    r.ok = false;
    r.failure = err.what();
    r.estimates.assign(cfg.estimators.size(), kNaN);
  }
  return r;
}

SummaryReport run_scenario(const ScenarioConfig& cfg, std::vector<ReplicationResult>* per_rep) {
  validate(cfg);
  SummaryReport report;
  report.scenario_id = cfg.id;
  report.randomizer = randomizer_name(cfg.randomizer);
  report.constraint_c = cfg.constraint_c;
  report.n = cfg.n;
  report.reps = cfg.reps;
  report.base_seed = cfg.base_seed;
  report.observe_x = cfg.observe_x;
  report.config_echo = cfg.config_echo;
  report.generated_at = utc_timestamp();
  report.truth = scenario_truth(cfg.pop, implied_target(cfg.randomizer), cfg.constraint_c,
                                cfg.observe_x);
  report.bound_per_trial = report.truth.bound / static_cast<double>(cfg.n);

  std::vector<ReplicationResult> results(cfg.reps);
  const std::size_t workers =
      std::min(cfg.reps, cfg.workers == 0 ? default_workers() : cfg.workers);
  if (workers <= 1) {
    for (std::size_t i = 0; i < cfg.reps; ++i) results[i] = run_replication(cfg, i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cfg.reps; i = next++) results[i] = run_replication(cfg, i);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Reduction in replication order.
  const std::size_t k = results.front().stratum_mean.size();
  std::vector<std::vector<double>> est_values(cfg.estimators.size());
  std::vector<double> outcome_values;
  std::vector<std::vector<double>> stratum_values(k), alloc_values(k);
  for (const auto& r : results) {
    if (!r.ok) {
      ++report.failed;
      continue;
    }
    for (std::size_t e = 0; e < cfg.estimators.size(); ++e) est_values[e].push_back(r.estimates[e]);
    outcome_values.push_back(r.mean_outcome);
    for (std::size_t x = 0; x < k; ++x) {
      stratum_values[x].push_back(r.stratum_mean[x]);
      alloc_values[x].push_back(r.allocation[x]);
    }
  }
  report.ok_reps = cfg.reps - report.failed;
  report.invalid = static_cast<double>(report.failed) > 0.01 * static_cast<double>(cfg.reps);
  report.low_power = report.ok_reps < 2;

  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    const auto [mean, var] = mean_and_variance(est_values[e]);
    report.estimators.push_back({cfg.estimators[e], mean, mean - report.truth.true_ate, var,
                                 var * static_cast<double>(cfg.n)});
  }
  report.mean_outcome = mean_and_variance(outcome_values).first;
  for (std::size_t x = 0; x < k; ++x) {
    report.stratum_mean_outcome.push_back(mean_and_variance(stratum_values[x]).first);
    report.mean_allocation.push_back(mean_and_variance(alloc_values[x]).first);
  }
  if (per_rep != nullptr) *per_rep = std::move(results);
  return report;
}

}  // namespace cara
