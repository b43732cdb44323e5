#include <doctest.h>

#include <cmath>

#include "cara/errors.hpp"
#include "cara/harness.hpp"

using namespace cara;

namespace {

ScenarioConfig small_config(RandomizerSpec spec, std::size_t reps = 200) {
  ScenarioConfig cfg;
  cfg.id = "small";
  cfg.randomizer = std::move(spec);
  cfg.n = 200;
  cfg.reps = reps;
  cfg.base_seed = 42;
  return cfg;
}

StratifiedDbcd optimal_dbcd(double c = kInf) {
  return StratifiedDbcd{2.0, 10, AllocationTargetSpec{ConstrainedOptimalRule{c}, kDefaultClipEps}};
}

}  // namespace

TEST_CASE("point-mass population gives exact estimates") {
  ScenarioConfig cfg = small_config(CompleteRandomization{});
  cfg.pop = PopulationSpec({0.5, 0.5}, {{PointMass{0.0}, PointMass{3.0}}, {PointMass{10.0}, PointMass{13.0}}});
  cfg.estimators = {Estimator::sdim};
  const ReplicationResult r = run_replication(cfg, 3);
  CHECK(r.ok);
  CHECK(r.estimates[0] == doctest::Approx(3.0).epsilon(1e-12));
  double pooled = 0.0;
  for (std::size_t x = 0; x < 2; ++x) {
    const double want = 10.0 * x + 3.0 * r.allocation[x];
    CHECK(r.stratum_mean[x] == doctest::Approx(want).epsilon(1e-12));
    pooled += static_cast<double>(r.stratum_n[x]) / 200.0 * r.stratum_mean[x];
  }
  CHECK(r.mean_outcome == doctest::Approx(pooled).epsilon(1e-12));
}

TEST_CASE("replications are deterministic in seed and index") {
  const ScenarioConfig cfg = small_config(optimal_dbcd());
  const ReplicationResult a = run_replication(cfg, 17);
  const ReplicationResult b = run_replication(cfg, 17);
  CHECK(a.estimates == b.estimates);
  CHECK(a.stratum_mean == b.stratum_mean);
  CHECK(run_replication(cfg, 18).estimates != a.estimates);
}

TEST_CASE("parallel and serial runs produce identical reports") {
  for (const RandomizerSpec& spec : {RandomizerSpec{optimal_dbcd(18.0)}, RandomizerSpec{Minimization{}}}) {
    ScenarioConfig serial = small_config(spec, 300);
    serial.workers = 1;
    ScenarioConfig parallel = serial;
    parallel.workers = 4;
    std::vector<ReplicationResult> rs, rp;
    const SummaryReport s = run_scenario(serial, &rs);
    const SummaryReport p = run_scenario(parallel, &rp);
    REQUIRE(s.estimators.size() == p.estimators.size());
    for (std::size_t e = 0; e < s.estimators.size(); ++e) {
      CHECK(s.estimators[e].mean == p.estimators[e].mean);
      CHECK(s.estimators[e].variance == p.estimators[e].variance);
    }
    CHECK(s.stratum_mean_outcome == p.stratum_mean_outcome);
    CHECK(s.mean_allocation == p.mean_allocation);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      CHECK(rs[i].rep_index == i);
      CHECK(rs[i].estimates == rp[i].estimates);
    }
  }
}

TEST_CASE("failed replications are counted and flagged") {
  // Ten subjects under CR often leave a stratum arm empty.
  ScenarioConfig cfg = small_config(CompleteRandomization{}, 400);
  cfg.n = 6;
  cfg.estimators = {Estimator::sdim};
  const SummaryReport r = run_scenario(cfg);
  CHECK(r.failed > 4);
  CHECK(r.invalid);
  CHECK(r.ok_reps + r.failed == 400);
  std::vector<ReplicationResult> per;
  run_scenario(cfg, &per);
  std::size_t failed = 0;
  for (const auto& p : per) {
    if (!p.ok) {
      ++failed;
      CHECK(std::isnan(p.estimates[0]));
      CHECK_FALSE(p.failure.empty());
    }
  }
  CHECK(failed == r.failed);
}

TEST_CASE("one replication: zero variance and low power") {
  const SummaryReport r = run_scenario(small_config(CompleteRandomization{}, 1));
  CHECK(r.low_power);
  CHECK(r.estimators[0].variance == 0.0);
}

TEST_CASE("report carries truth and scaling") {
  ScenarioConfig cfg = small_config(optimal_dbcd(16.0), 50);
  cfg.constraint_c = 16.0;
  const SummaryReport r = run_scenario(cfg);
  CHECK(r.truth.true_ate == doctest::Approx(14.288).epsilon(1e-4));
  CHECK(r.bound_per_trial == doctest::Approx(r.truth.bound / 200.0));
  const EstimatorSummary* s = r.find(Estimator::sdim);
  REQUIRE(s != nullptr);
  CHECK(s->bias == doctest::Approx(s->mean - r.truth.true_ate));
  CHECK(s->scaled_variance == doctest::Approx(200.0 * s->variance));
  CHECK(r.truth.active[1]);
  CHECK(r.stratum_mean_outcome.size() == 3);
}

TEST_CASE("invalid scenario configs") {
  ScenarioConfig cfg = small_config(CompleteRandomization{});
  cfg.reps = 0;
  CHECK_THROWS_AS(run_scenario(cfg), DomainError);
  cfg.reps = 1;
  cfg.n = 0;
  CHECK_THROWS_AS(run_scenario(cfg), DomainError);
  cfg.n = 10;
  cfg.estimators.clear();
  CHECK_THROWS_AS(run_scenario(cfg), DomainError);
}

TEST_CASE("one replication lands near the unconstrained stratum outcome") {
  const ReplicationResult r = run_replication(small_config(optimal_dbcd()), 0);
  CHECK(r.stratum_mean[1] == doctest::Approx(23.45).epsilon(0.1));
}
