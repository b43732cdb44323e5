#include "cara/targets.hpp"

#include <algorithm>
#include <cmath>

#include "cara/errors.hpp"

namespace cara {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_clip(double clip_eps) {
  if (!(clip_eps > 0.0 && clip_eps < 0.5)) throw DomainError("clip_eps must lie in (0, 0.5)");
}

double unclipped_neyman(const ArmMoments& theta) {
  return theta.sd1() / (theta.sd1() + theta.sd0());
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double clip_probability(double rho, double clip_eps) {
  return std::clamp(rho, clip_eps, 1.0 - clip_eps);
}

void validate(const AllocationTargetSpec& spec) {
  check_clip(spec.clip_eps);
  std::visit(overloaded{
                 [](const BandBisRule& r) {
                   if (!(r.scale > 0.0)) throw DomainError("BandBis scale T must be positive");
                 },
                 [](const ConstrainedOptimalRule& r) {
                   if (std::isnan(r.c)) throw DomainError("constraint c must not be NaN");
                 },
                 [](const FixedRule& r) {
                   if (!(r.rho >= 0.0 && r.rho <= 1.0)) {
                     throw DomainError("fixed target must lie in [0, 1]");
                   }
                 },
                 [](const auto&) {},
             },
             spec.rule);
}

std::string rule_name(const TargetRule& rule) {
  return std::visit(overloaded{
                        [](const NeymanRule&) { return std::string("neyman"); },
                        [](const RsihrRule&) { return std::string("rsihr"); },
                        [](const BandBisRule&) { return std::string("bandbis"); },
                        [](const ConstrainedOptimalRule&) { return std::string("optimal"); },
                        [](const FixedRule&) { return std::string("fixed"); },
                    },
                    rule);
}

TargetValue neyman(const ArmMoments& theta, double clip_eps) {
  check_clip(clip_eps);
  validate(theta);
  if (theta.var1 + theta.var0 <= 0.0) return {0.5, true, false};
  return {clip_probability(unclipped_neyman(theta), clip_eps), false, false};
}

TargetValue rsihr(const ArmMoments& theta, double clip_eps) {
  check_clip(clip_eps);
  validate(theta);
  if (!(theta.mu0 > 0.0 && theta.mu1 > 0.0)) {
    throw DomainError("RSIHR allocation needs positive arm means");
  }
  const double num = theta.sd1() * std::sqrt(theta.mu0);
  const double den = num + theta.sd0() * std::sqrt(theta.mu1);
  if (den <= 0.0) return {0.5, true, false};
  return {clip_probability(num / den, clip_eps), false, false};
}

TargetValue bandbis(const ArmMoments& theta, double scale, double clip_eps) {
  check_clip(clip_eps);
  if (!(scale > 0.0)) throw DomainError("BandBis scale T must be positive");
  return {clip_probability(normal_cdf((theta.mu1 - theta.mu0) / scale), clip_eps), false, false};
}

TargetValue constrained_optimal(const ArmMoments& theta, double c, double clip_eps,
                                InfeasiblePolicy policy) {
  check_clip(clip_eps);
  validate(theta);
  if (std::isnan(c)) throw DomainError("constraint c must not be NaN");

  if (theta.var1 + theta.var0 <= 0.0) {
    // Flat objective: the symmetric tie-break applies whenever it is feasible.
    const double outcome = 0.5 * (theta.mu1 + theta.mu0);
    if (outcome <= c) return {0.5, true, false};
  } else {
    const double e_star = unclipped_neyman(theta);
    const double outcome = e_star * theta.mu1 + (1.0 - e_star) * theta.mu0;
    if (!(outcome > c)) return {clip_probability(e_star, clip_eps), false, false};
  }

  // Active constraint: the allocation sits on rho mu1 + (1-rho) mu0 = c.
  const double gap = theta.mu1 - theta.mu0;
  if (gap == 0.0) {
    if (policy == InfeasiblePolicy::raise) {
      throw InfeasibleError("constraint active with equal arm means: no allocation meets it");
    }
    return {clip_probability(0.5, clip_eps), true, true};
  }
  const double rho = (c - theta.mu0) / gap;
  if (!(rho > 0.0 && rho < 1.0) && policy == InfeasiblePolicy::raise) {
    throw InfeasibleError("constraint cannot be met by any allocation in (0, 1)");
  }
  return {clip_probability(rho, clip_eps), false, true};
}

double oracle_constrained(const ArmMoments& theta, double c, std::size_t grid_n) {
  if (grid_n < 100) throw DomainError("oracle grid needs at least 100 points");
  validate(theta);
  const double denom = static_cast<double>(grid_n + 1);
  double best_rho = -1.0;
  double best_obj = kInf;
  for (std::size_t k = 1; k <= grid_n; ++k) {
    const double rho = static_cast<double>(k) / denom;
    if (rho * theta.mu1 + (1.0 - rho) * theta.mu0 > c) continue;
    const double obj = theta.var0 / (1.0 - rho) + theta.var1 / rho;
    if (obj < best_obj ||
        (obj == best_obj && std::abs(rho - 0.5) < std::abs(best_rho - 0.5))) {
      best_obj = obj;
      best_rho = rho;
    }
  }
  if (best_rho < 0.0) throw InfeasibleError("no feasible allocation on the oracle grid");
  return best_rho;
}

TargetValue evaluate_target(const AllocationTargetSpec& spec, const ArmMoments& theta,
                            InfeasiblePolicy policy) {
  return std::visit(
      overloaded{
          [&](const NeymanRule&) { return neyman(theta, spec.clip_eps); },
          [&](const RsihrRule&) { return rsihr(theta, spec.clip_eps); },
          [&](const BandBisRule& r) { return bandbis(theta, r.scale, spec.clip_eps); },
          [&](const ConstrainedOptimalRule& r) {
            return constrained_optimal(theta, r.c, spec.clip_eps, policy);
          },
          [&](const FixedRule& r) {
            return TargetValue{clip_probability(r.rho, spec.clip_eps), false, false};
          },
      },
      spec.rule);
}

}  // namespace cara
