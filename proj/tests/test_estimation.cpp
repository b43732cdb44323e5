#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cara/arm_estimate.hpp"
#include "cara/errors.hpp"
#include "cara/estimation.hpp"
#include "cara/randomizers.hpp"
#include "cara/rng.hpp"

using namespace cara;

namespace {

ArmEstimate fold(const std::vector<double>& ys) {
  ArmEstimate e;
  for (double y : ys) e = update_estimate(e, y);
  return e;
}

}  // namespace

TEST_CASE("welford update") {
  ArmEstimate e = update_estimate({}, 5.0);
  CHECK(e.count == 1);
  CHECK(e.mean == 5.0);
  CHECK_FALSE(e.variance().has_value());
  e = update_estimate(e, 7.0);
  CHECK(e.count == 2);
  CHECK(e.mean == 6.0);
  CHECK(*e.variance() == doctest::Approx(2.0));
}

TEST_CASE("welford matches two-pass moments and is order independent") {
  Rng rng = make_stream(12, 0);
  std::normal_distribution<double> d(1e8, 0.5);
  std::vector<double> ys(5000);
  for (double& y : ys) y = d(rng);
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double ss = 0.0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  const ArmEstimate e = fold(ys);
  CHECK(e.mean == doctest::Approx(mean).epsilon(1e-14));
  // Rounding scales with eps * |mean| / sd, about 5e-8 here; the textbook
  // sum-of-squares formula loses every digit at this offset.
  CHECK(*e.variance() == doctest::Approx(ss / (ys.size() - 1)).epsilon(1e-6));
  double sum = 0.0, sum_sq = 0.0;
  for (double y : ys) {
    sum += y;
    sum_sq += y * y;
  }
  const double naive = (sum_sq - sum * sum / ys.size()) / (ys.size() - 1);
  CHECK(std::abs(naive - ss / (ys.size() - 1)) > 1e-2);

  std::shuffle(ys.begin(), ys.end(), rng);
  const ArmEstimate f = fold(ys);
  CHECK(f.mean == doctest::Approx(e.mean).epsilon(1e-14));
  CHECK(*f.variance() == doctest::Approx(*e.variance()).epsilon(1e-6));

  std::vector<double> shifted = ys;
  for (double& y : shifted) y += 12.5;
  const ArmEstimate g = fold(shifted);
  CHECK(g.mean == doctest::Approx(e.mean + 12.5).epsilon(1e-14));
  CHECK(*g.variance() == doctest::Approx(*e.variance()).epsilon(1e-6));
}

TEST_CASE("difference in means") {
  TrialState s(1);
  s.record(StratumId{0}, Arm::treatment, 2.0);
  s.record(StratumId{0}, Arm::treatment, 4.0);
  s.record(StratumId{0}, Arm::control, 1.0);
  CHECK(dim_estimate(s) == doctest::Approx(2.0));
  CHECK(stratified_dim_estimate(s) == dim_estimate(s));

  TrialState flat(2);
  for (int i = 0; i < 6; ++i) flat.record(StratumId{static_cast<std::uint32_t>(i % 2)}, arm_from_bool(i % 3 == 0), 7.0);
  CHECK(dim_estimate(flat) == 0.0);

  TrialState empty_arm(1);
  empty_arm.record(StratumId{0}, Arm::control, 1.0);
  CHECK_THROWS_AS(dim_estimate(empty_arm), EstimationError);
  CHECK_THROWS_AS(stratified_dim_estimate(empty_arm), EstimationError);
  CHECK_THROWS_AS(dim_estimate(TrialState(1)), EstimationError);
}

TEST_CASE("stratified difference in means") {
  TrialState s(2);
  s.record(StratumId{0}, Arm::treatment, 5.0);
  s.record(StratumId{0}, Arm::control, 1.0);
  s.record(StratumId{1}, Arm::treatment, 3.0);
  s.record(StratumId{1}, Arm::control, 1.0);
  CHECK(stratified_dim_estimate(s) == doctest::Approx(3.0));

  // Equal allocation and equal gaps: both estimators agree.
  TrialState e(2);
  for (std::uint32_t x = 0; x < 2; ++x) {
    for (int i = 0; i < 3; ++i) {
      e.record(StratumId{x}, Arm::treatment, 10.0 * x + 4.0);
      e.record(StratumId{x}, Arm::control, 10.0 * x + 1.0);
    }
  }
  CHECK(stratified_dim_estimate(e) == doctest::Approx(3.0));
  CHECK(dim_estimate(e) == doctest::Approx(3.0));

  // A stratum absent from the trial is skipped.
  TrialState absent(3);
  absent.record(StratumId{2}, Arm::treatment, 2.0);
  absent.record(StratumId{2}, Arm::control, 0.5);
  CHECK(stratified_dim_estimate(absent) == doctest::Approx(1.5));
}

TEST_CASE("point-mass arms: dim is the allocation-weighted gap") {
  // Gap 2 in every stratum; stratum means differ but are shared by both arms.
  const PopulationSpec pop({0.5, 0.5}, {{PointMass{0.0}, PointMass{2.0}}, {PointMass{10.0}, PointMass{12.0}}});
  Rng rng = make_stream(13, 0);
  const TrialState s = run_trial(CompleteRandomization{0.5}, pop, 400, rng);
  CHECK(stratified_dim_estimate(s) == doctest::Approx(2.0).epsilon(1e-12));
  double a1 = 0.0, a0 = 0.0;
  for (std::uint32_t x = 0; x < 2; ++x) {
    a1 += 10.0 * x * s.arm_count(StratumId{x}, Arm::treatment);
    a0 += 10.0 * x * s.arm_count(StratumId{x}, Arm::control);
  }
  const double want = 2.0 + a1 / s.total_arm_count(Arm::treatment) - a0 / s.total_arm_count(Arm::control);
  CHECK(dim_estimate(s) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("estimators are invariant to subject order") {
  Rng rng = make_stream(14, 0);
  const TrialState s = run_trial(CompleteRandomization{0.4}, continuous_three_strata_model(), 300, rng);
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  TrialState r(s.num_strata());
  for (std::size_t i : order) {
    r.record(StratumId{s.strata()[i]}, static_cast<Arm>(s.arms()[i]), s.outcomes()[i]);
  }
  CHECK(stratified_dim_estimate(r) == doctest::Approx(stratified_dim_estimate(s)).epsilon(1e-12));
  CHECK(dim_estimate(r) == doctest::Approx(dim_estimate(s)).epsilon(1e-12));
}

TEST_CASE("single stratum: stratified estimator is bit-identical to dim") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng = make_stream(seed, 99);
    const TrialState s = run_trial(EfronBcd{}, continuous_three_strata_model(), 250, rng, false);
    CHECK(stratified_dim_estimate(s) == dim_estimate(s));
  }
}

TEST_CASE("plug-in variance") {
  TrialState pm(1);
  for (int i = 0; i < 4; ++i) {
    pm.record(StratumId{0}, Arm::treatment, 3.0);
    pm.record(StratumId{0}, Arm::control, 1.0);
  }
  CHECK(plug_in_variance(pm) == 0.0);

  // Two strata, no within variance; gaps 4 and 2 with equal weight.
  TrialState two(2);
  for (int i = 0; i < 2; ++i) {
    two.record(StratumId{0}, Arm::treatment, 5.0);
    two.record(StratumId{0}, Arm::control, 1.0);
    two.record(StratumId{1}, Arm::treatment, 3.0);
    two.record(StratumId{1}, Arm::control, 1.0);
  }
  CHECK(plug_in_variance(two) == doctest::Approx(1.0));

  // Within-stratum term: s2 = 2 in each arm at allocation 1/2 -> 2/0.5 + 2/0.5.
  TrialState w(1);
  w.record(StratumId{0}, Arm::treatment, 5.0);
  w.record(StratumId{0}, Arm::treatment, 7.0);
  w.record(StratumId{0}, Arm::control, 1.0);
  w.record(StratumId{0}, Arm::control, 3.0);
  CHECK(plug_in_variance(w) == doctest::Approx(8.0));

  TrialState thin(1);
  thin.record(StratumId{0}, Arm::treatment, 1.0);
  thin.record(StratumId{0}, Arm::control, 1.0);
  CHECK_THROWS_AS(plug_in_variance(thin), EstimationError);
}
