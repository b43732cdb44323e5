#pragma once
#include <cstddef>
#include <limits>
#include <string>
#include <variant>

#include "cara/model.hpp"

namespace cara {

inline constexpr double kDefaultClipEps = 0.01;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Target allocation rules rho(theta).
struct NeymanRule {};
struct RsihrRule {};
struct BandBisRule {
  double scale = 30.0;  // T
};
struct ConstrainedOptimalRule {
  double c = kInf;  // per-stratum outcome constraint; +inf means unconstrained
};
struct FixedRule {
  double rho = 0.5;
};

using TargetRule = std::variant<NeymanRule, RsihrRule, BandBisRule, ConstrainedOptimalRule, FixedRule>;

struct AllocationTargetSpec {
  TargetRule rule = NeymanRule{};
  double clip_eps = kDefaultClipEps;
};

// Throws DomainError on T <= 0, clip_eps outside (0, 0.5) or a fixed rho outside [0, 1].
void validate(const AllocationTargetSpec& spec);
std::string rule_name(const TargetRule& rule);

struct TargetValue {
  double rho = 0.5;
  bool degenerate = false;  // tie-break used because the rule was undefined
  bool active = false;      // constraint binds (constrained-optimal only)
};

double clip_probability(double rho, double clip_eps);

// sigma1 / (sigma1 + sigma0), clipped. Both variances zero -> 0.5, degenerate.
TargetValue neyman(const ArmMoments& theta, double clip_eps = kDefaultClipEps);

// sigma1 sqrt(mu0) / (sigma1 sqrt(mu0) + sigma0 sqrt(mu1)), clipped.
// Throws DomainError for a nonpositive mean; zero denominator -> 0.5, degenerate.
TargetValue rsihr(const ArmMoments& theta, double clip_eps = kDefaultClipEps);

// Phi((mu1 - mu0) / T), clipped. Throws DomainError for T <= 0.
TargetValue bandbis(const ArmMoments& theta, double scale, double clip_eps = kDefaultClipEps);

// How constrained_optimal treats an active constraint that no allocation in
// (0,1) can satisfy.
enum class InfeasiblePolicy {
  raise,  // throw InfeasibleError
  clamp,  // return the clipped linear-branch value (for estimated moments)
};

// Closed-form minimiser of var0/(1-rho) + var1/rho subject to
// rho mu1 + (1-rho) mu0 <= c. The switch is taken on the unclipped Neyman
// value; only the returned rho is clipped.
TargetValue constrained_optimal(const ArmMoments& theta, double c,
                                double clip_eps = kDefaultClipEps,
                                InfeasiblePolicy policy = InfeasiblePolicy::raise);

// Brute-force grid minimiser of the same problem over
// rho in {1/(grid_n+1), ..., grid_n/(grid_n+1)}. Ties in the objective go to
// the grid point closest to 1/2. Throws InfeasibleError when no grid point is
// feasible and DomainError when grid_n < 100.
double oracle_constrained(const ArmMoments& theta, double c, std::size_t grid_n);

// Dispatch on the rule. `policy` only affects the constrained-optimal rule.
TargetValue evaluate_target(const AllocationTargetSpec& spec, const ArmMoments& theta,
                            InfeasiblePolicy policy = InfeasiblePolicy::raise);

double normal_cdf(double z);

}  // namespace cara
