#include <doctest.h>

#include <cmath>
#include <random>

#include "cara/errors.hpp"
#include "cara/rng.hpp"
#include "cara/targets.hpp"

using namespace cara;

TEST_CASE("neyman") {
  CHECK(neyman({1.0, 4.0, 0.0, 4.0}).rho == doctest::Approx(0.5));
  CHECK(neyman({1.0, 4.0, 0.0, 1.0}).rho == doctest::Approx(2.0 / 3.0));
  const TargetValue d = neyman({1.0, 0.0, 0.0, 0.0});
  CHECK(d.rho == 0.5);
  CHECK(d.degenerate);
  CHECK(neyman({0.0, 0.0, 0.0, 1.0}).rho == doctest::Approx(0.01));
  CHECK(neyman({0.0, 1.0, 0.0, 0.0}, 0.05).rho == doctest::Approx(0.95));
}

TEST_CASE("neyman solves the first-order condition") {
  Rng rng = make_stream(11, 0);
  std::uniform_real_distribution<double> var(0.01, 50.0);
  for (int i = 0; i < 500; ++i) {
    const ArmMoments th{0.0, var(rng), 0.0, var(rng)};
    const TargetValue t = neyman(th, 1e-9);
    const double e = t.rho;
    const double residual = th.var0 / ((1 - e) * (1 - e)) - th.var1 / (e * e);
    CHECK(std::abs(residual) <= 1e-9 * std::max(th.var0, th.var1));
  }
}

TEST_CASE("rsihr") {
  CHECK(rsihr({2.0, 1.0, 2.0, 1.0}).rho == doctest::Approx(0.5));
  // Direct evaluation with Bernoulli standard deviations.
  const double s1 = std::sqrt(0.9 * 0.1), s0 = std::sqrt(0.5 * 0.5);
  const double want = s1 * std::sqrt(0.5) / (s1 * std::sqrt(0.5) + s0 * std::sqrt(0.9));
  const TargetValue t = rsihr({0.9, 0.09, 0.5, 0.25});
  CHECK(t.rho == doctest::Approx(want).epsilon(1e-12));
  CHECK(t.rho == doctest::Approx(0.3090).epsilon(1e-3));
  CHECK_THROWS_AS(rsihr({1.0, 1.0, 0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rsihr({-1.0, 1.0, 2.0, 1.0}), DomainError);
  CHECK(rsihr({1.0, 0.0, 1.0, 0.0}).degenerate);
}

TEST_CASE("bandbis") {
  CHECK(bandbis({5.0, 1.0, 5.0, 1.0}, 30.0).rho == doctest::Approx(0.5));
  CHECK(bandbis({30.0, 1.0, 0.0, 1.0}, 30.0).rho == doctest::Approx(0.84134).epsilon(1e-5));
  CHECK(bandbis({1e6, 1.0, 0.0, 1.0}, 30.0).rho == doctest::Approx(0.99));
  CHECK_THROWS_AS(bandbis({0.0, 1.0, 0.0, 1.0}, 0.0), DomainError);
  CHECK(normal_cdf(-1.0) == doctest::Approx(0.158655254).epsilon(1e-8));
}

TEST_CASE("constrained optimal closed form") {
  const ArmMoments th{10.0, 1.0, 0.0, 1.0};
  const TargetValue inf = constrained_optimal(th, kInf);
  CHECK(inf.rho == neyman(th).rho);
  CHECK_FALSE(inf.active);
  const TargetValue c4 = constrained_optimal(th, 4.0);
  CHECK(c4.rho == doctest::Approx(0.4));
  CHECK(c4.active);
  const TargetValue c6 = constrained_optimal(th, 6.0);
  CHECK(c6.rho == doctest::Approx(0.5));
  CHECK_FALSE(c6.active);
  CHECK(oracle_constrained(th, 4.0, 100000) == doctest::Approx(0.4).epsilon(2e-5));
}

TEST_CASE("constrained optimal infeasibility") {
  // Active branch with equal means.
  CHECK_THROWS_AS(constrained_optimal({5.0, 1.0, 5.0, 1.0}, 4.0), InfeasibleError);
  // Both arm means above c.
  CHECK_THROWS_AS(constrained_optimal({10.0, 1.0, 8.0, 1.0}, 4.0), InfeasibleError);
  CHECK_THROWS_AS(oracle_constrained({10.0, 1.0, 8.0, 1.0}, 4.0, 1000), InfeasibleError);
  CHECK_THROWS_AS(oracle_constrained({10.0, 1.0, 8.0, 1.0}, 9.0, 50), DomainError);
  const TargetValue clamped =
      constrained_optimal({10.0, 1.0, 8.0, 1.0}, 4.0, kDefaultClipEps, InfeasiblePolicy::clamp);
  CHECK(clamped.rho == doctest::Approx(0.01));
}

TEST_CASE("zero-variance arms with a feasible constraint") {
  const ArmMoments th{1.0, 0.0, 0.0, 0.0};
  CHECK(constrained_optimal(th, kInf).rho == 0.5);
  CHECK(oracle_constrained(th, kInf, 1000) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(oracle_constrained(th, 0.8, 1000) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("constrained optimal agrees with the grid oracle on random cases") {
  Rng rng = make_stream(2024, 1);
  std::uniform_real_distribution<double> mean(-20.0, 20.0);
  std::uniform_real_distribution<double> var(0.05, 40.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t grid_n = 100000;
  int compared = 0;
  for (int i = 0; i < 200; ++i) {
    const ArmMoments th{mean(rng), var(rng), mean(rng), var(rng)};
    for (int j = 0; j < 20; ++j) {
      // c spread over the range where the constraint can bind or not.
      const double lo = std::min(th.mu0, th.mu1), hi = std::max(th.mu0, th.mu1);
      const double c = lo + (hi - lo) * (1.2 * u(rng) - 0.1);
      double oracle = 0.0;
      try {
        oracle = oracle_constrained(th, c, grid_n);
      } catch (const InfeasibleError&) {
        CHECK_THROWS_AS(constrained_optimal(th, c, 1e-9), InfeasibleError);
        continue;
      }
      const double got = constrained_optimal(th, c, 1e-9).rho;
      CAPTURE(th.mu1);
      CAPTURE(th.mu0);
      CAPTURE(c);
      CHECK(std::abs(got - oracle) <= 2.0 / grid_n);
      ++compared;
    }
  }
  CHECK(compared > 3000);
}

TEST_CASE("constrained optimal is nondecreasing in c when mu1 > mu0") {
  const ArmMoments th{12.0, 9.0, 2.0, 1.0};
  double prev = 0.0;
  for (double c = 2.5; c < 14.0; c += 0.25) {
    const double rho = constrained_optimal(th, c).rho;
    CHECK(rho >= prev);
    prev = rho;
  }
}

TEST_CASE("all rules respect the clip range") {
  Rng rng = make_stream(5, 5);
  std::uniform_real_distribution<double> mean(0.1, 100.0);
  std::uniform_real_distribution<double> var(0.0, 100.0);
  const double eps = 0.02;
  for (int i = 0; i < 300; ++i) {
    const ArmMoments th{mean(rng), var(rng), mean(rng), var(rng)};
    for (const TargetRule& rule : {TargetRule{NeymanRule{}}, TargetRule{RsihrRule{}},
                                   TargetRule{BandBisRule{30.0}}, TargetRule{ConstrainedOptimalRule{}},
                                   TargetRule{FixedRule{1.0}}}) {
      const double rho = evaluate_target({rule, eps}, th).rho;
      CHECK(rho >= eps);
      CHECK(rho <= 1.0 - eps);
    }
  }
}

TEST_CASE("target spec validation and names") {
  CHECK_THROWS_AS(validate(AllocationTargetSpec{BandBisRule{-1.0}, 0.01}), DomainError);
  CHECK_THROWS_AS(validate(AllocationTargetSpec{NeymanRule{}, 0.5}), DomainError);
  CHECK_THROWS_AS(validate(AllocationTargetSpec{NeymanRule{}, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(AllocationTargetSpec{FixedRule{1.5}, 0.01}), DomainError);
  CHECK(rule_name(ConstrainedOptimalRule{3.0}) == "optimal");
  CHECK(rule_name(BandBisRule{}) == "bandbis");
  CHECK(clip_probability(1.0, 0.01) == doctest::Approx(0.99));
}
