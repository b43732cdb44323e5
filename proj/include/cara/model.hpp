#pragma once
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cara {

// Discrete covariate level x. Indexes strata of a PopulationSpec.
struct StratumId {
  std::uint32_t value = 0;

  constexpr StratumId() = default;
  constexpr explicit StratumId(std::uint32_t v) : value(v) {}
  constexpr std::size_t index() const { return value; }
  auto operator<=>(const StratumId&) const = default;
};

enum class Arm : std::uint8_t { control = 0, treatment = 1 };

constexpr std::size_t arm_index(Arm w) { return static_cast<std::size_t>(w); }
constexpr Arm arm_from_bool(bool treated) { return treated ? Arm::treatment : Arm::control; }

// scale * T + shift, T ~ non-central t(df, noncentrality).
struct NoncentralT {
  double scale = 1.0;
  double shift = 0.0;
  double df = 5.0;
  double noncentrality = 0.0;
};

struct Bernoulli {
  double p = 0.5;
};

struct PointMass {
  double value = 0.0;
};

using OutcomeDist = std::variant<NoncentralT, Bernoulli, PointMass>;

std::string describe(const OutcomeDist& d);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

// theta_x: per-stratum arm means and variances.
struct ArmMoments {
  double mu1 = 0.0;
  double var1 = 0.0;
  double mu0 = 0.0;
  double var0 = 0.0;

  double sd1() const;
  double sd0() const;
  double mean(Arm w) const { return w == Arm::treatment ? mu1 : mu0; }
  double variance(Arm w) const { return w == Arm::treatment ? var1 : var0; }
  bool operator==(const ArmMoments&) const = default;
};

// Throws DomainError unless both variances are finite and nonnegative.
void validate(const ArmMoments& theta);

// Exact analytic mean and variance. Throws InfiniteVarianceError for df <= 2 and
// DomainError for an invalid Bernoulli p.
Moments dist_moments(const OutcomeDist& d);

// Stratum probabilities p(x) plus one outcome distribution per (stratum, arm).
class PopulationSpec {
 public:
  using ArmPair = std::array<OutcomeDist, 2>;  // indexed by arm_index

  // Throws DomainError if probabilities do not sum to 1 (within 1e-12), are
  // negative, or the outcome table does not cover every stratum.
  PopulationSpec(std::vector<double> strata_probs, std::vector<ArmPair> outcomes);

  std::size_t num_strata() const { return probs_.size(); }
  double prob(StratumId x) const;
  const std::vector<double>& strata_probs() const { return probs_; }
  const OutcomeDist& outcome(StratumId x, Arm w) const;
  const std::vector<ArmPair>& outcomes() const { return outcomes_; }

 private:
  void check(StratumId x) const;

  std::vector<double> probs_;
  std::vector<ArmPair> outcomes_;
};

ArmMoments stratum_moments(const PopulationSpec& pop, StratumId x);

// Moments of the mixture over strata, i.e. the view without an observed covariate.
ArmMoments pool_moments(const PopulationSpec& pop);

// Analytic moments per stratum together with stratum probabilities. A pooled
// table has exactly one stratum with probability 1.
struct MomentTable {
  std::vector<double> probs;
  std::vector<ArmMoments> strata;

  std::size_t size() const { return strata.size(); }
};

MomentTable stratified_moments(const PopulationSpec& pop);
MomentTable pooled_moments(const PopulationSpec& pop);
inline MomentTable moment_table(const PopulationSpec& pop, bool observe_x) {
  return observe_x ? stratified_moments(pop) : pooled_moments(pop);
}

// Builders for the two simulation populations used throughout the tables.
// Continuous model: three strata of scaled/shifted non-central t(5) outcomes.
PopulationSpec continuous_three_strata_model();
// Binary model: two strata, arm 0 Bernoulli(0.5), arm 1 Bernoulli(0.9 / 0.5).
PopulationSpec binary_two_strata_model(std::vector<double> strata_probs = {2.0 / 3.0, 1.0 / 3.0});

}  // namespace cara
