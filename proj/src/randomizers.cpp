#include "cara/randomizers.hpp"

#include <cmath>
#include <sstream>

#include "cara/dgp.hpp"
#include "cara/errors.hpp"

namespace cara {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in [0, 1]");
}

void check_biased_coin(double p, const char* what) {
  if (!(p > 0.5 && p <= 1.0)) throw DomainError(std::string(what) + " must lie in (0.5, 1]");
}

void check_dbcd(double gamma, std::uint32_t n0, const AllocationTargetSpec& target) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
  if (n0 < 2) throw DomainError("burn-in n0 must be at least 2");
  validate(target);
}

AssignmentDecision coin(double prob, Rng& rng, Phase phase) {
  return {arm_from_bool(bernoulli_draw(rng, prob)), prob, phase};
}

}  // namespace

void validate(const RandomizerSpec& spec) {
  std::visit(overloaded{
                 [](const CompleteRandomization& r) { check_probability(r.p, "CR probability"); },
                 [](const PermutedBlock& r) {
                   if (r.block_size == 0 || r.block_size % 2 != 0) {
                     throw DomainError("block size must be a positive even number");
                   }
                 },
                 [](const EfronBcd& r) { check_biased_coin(r.p, "Efron coin probability"); },
                 [](const Minimization& r) {
                   check_biased_coin(r.p, "minimization coin probability");
                   if (r.weights.size() != 1 || !(r.weights[0] > 0.0)) {
                     throw DomainError("minimization takes one positive weight per factor (one factor)");
                   }
                 },
                 [](const StratifiedDbcd& r) { check_dbcd(r.gamma, r.n0, r.target); },
                 [](const Cadbcd& r) { check_dbcd(r.gamma, r.n0, r.target); },
             },
             spec);
}

std::string randomizer_name(const RandomizerSpec& spec) {
  return std::visit(
      overloaded{
          [](const CompleteRandomization&) { return std::string("CR"); },
          [](const PermutedBlock&) { return std::string("PB"); },
          [](const EfronBcd&) { return std::string("BCD"); },
          [](const Minimization&) { return std::string("MIN"); },
          [](const StratifiedDbcd& d) { return "SDBCD_" + rule_name(d.target.rule); },
          [](const Cadbcd& d) { return "CADBCD_" + rule_name(d.target.rule); },
      },
      spec);
}

AllocationTargetSpec implied_target(const RandomizerSpec& spec) {
  return std::visit(overloaded{
                        [](const CompleteRandomization& r) {
                          return AllocationTargetSpec{FixedRule{r.p}, kDefaultClipEps};
                        },
                        [](const StratifiedDbcd& d) { return d.target; },
                        [](const Cadbcd& d) { return d.target; },
                        [](const auto&) { return AllocationTargetSpec{FixedRule{0.5}, kDefaultClipEps}; },
                    },
                    spec);
}

const char* phase_name(Phase phase) { return phase == Phase::burn_in ? "burn_in" : "adaptive"; }

double g_allocation(double x, double y, double gamma) {
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0)) {
    throw DomainError("g_allocation arguments must lie in [0, 1]");
  }
  if (x == 0.0) return 1.0;
  if (x == 1.0) return 0.0;
  const double a = y * std::pow(y / x, gamma);
  const double b = (1.0 - y) * std::pow((1.0 - y) / (1.0 - x), gamma);
  return a / (a + b);
}

Randomizer::Randomizer(RandomizerSpec spec, std::size_t num_strata)
    : spec_(std::move(spec)), blocks_(num_strata), last_target_(num_strata, 0.5) {
  validate(spec_);
  if (num_strata == 0) throw DomainError("randomizer needs at least one stratum");
}

const AllocationTargetSpec* Randomizer::target_spec() const {
  if (const auto* d = std::get_if<StratifiedDbcd>(&spec_)) return &d->target;
  if (const auto* d = std::get_if<Cadbcd>(&spec_)) return &d->target;
  return nullptr;
}

double Randomizer::estimated_target(const TrialState& state, StratumId x) {
  const AllocationTargetSpec* target = target_spec();
  if (target == nullptr) return 0.5;
  const ArmMoments theta = state.estimated_moments(x);
  // A zero sample variance (e.g. all-success binary burn-in) would pin a
  // variance-driven target at the clip and starve that arm for good.
  const bool uses_variance = !std::holds_alternative<BandBisRule>(target->rule) &&
                             !std::holds_alternative<FixedRule>(target->rule);
  if (uses_variance && (theta.var1 == 0.0 || theta.var0 == 0.0)) return last_target_.at(x.index());
  try {
    const TargetValue t = evaluate_target(*target, theta, InfeasiblePolicy::raise);
    last_target_.at(x.index()) = t.rho;
    return t.rho;
  } catch (const DomainError&) {
    return last_target_.at(x.index());
  } catch (const InfeasibleError&) {
    // No allocation meets the constraint at the current estimates; steer by
    // the unconstrained optimum so both arms keep being sampled.
    return neyman(theta, target->clip_eps).rho;
  }
}

AssignmentDecision Randomizer::draw_from_block(Block& block, std::uint32_t size, Rng& rng,
                                               Phase phase) {
  if (block.slots_left == 0) block = {size / 2, size};
  const double prob = static_cast<double>(block.ones_left) / static_cast<double>(block.slots_left);
  const AssignmentDecision d = coin(prob, rng, phase);
  --block.slots_left;
  if (d.arm == Arm::treatment) --block.ones_left;
  return d;
}

namespace {

// Permuted block of 2 n0 at the start of each stratum, drawn sequentially: the
// next slot is a treatment slot with probability (ones left) / (slots left).
AssignmentDecision burn_in_draw(const TrialState& state, StratumId x, std::uint32_t n0, Rng& rng) {
  const double ones_left = static_cast<double>(n0) -
                           static_cast<double>(state.arm_count(x, Arm::treatment));
  const double slots_left = 2.0 * n0 - static_cast<double>(state.stratum_count(x));
  return coin(ones_left / slots_left, rng, Phase::burn_in);
}

bool in_burn_in(const TrialState& state, StratumId x, std::uint32_t n0) {
  return state.stratum_count(x) < 2 * static_cast<std::size_t>(n0);
}

}  // namespace

AssignmentDecision Randomizer::stratified_dbcd(const StratifiedDbcd& d, const TrialState& state,
                                               StratumId x, Rng& rng) {
  if (in_burn_in(state, x, d.n0)) return burn_in_draw(state, x, d.n0, rng);
  const double rho_hat = estimated_target(state, x);
  const double proportion = static_cast<double>(state.arm_count(x, Arm::treatment)) /
                            static_cast<double>(state.stratum_count(x));
  return coin(g_allocation(proportion, rho_hat, d.gamma), rng, Phase::adaptive);
}

AssignmentDecision Randomizer::cadbcd(const Cadbcd& d, const TrialState& state, StratumId x,
                                      Rng& rng) {
  if (in_burn_in(state, x, d.n0)) return burn_in_draw(state, x, d.n0, rng);

  // Every enrolled subject of an estimable stratum s contributes rho_hat(s)
  // at the current estimates, so the running sum collapses to n(s) rho_hat(s).
  double target_sum = 0.0;
  double treated = 0.0;
  double enrolled = 0.0;
  double rho_x = 0.5;
  for (std::uint32_t s = 0; s < state.num_strata(); ++s) {
    const StratumId sid{s};
    if (in_burn_in(state, sid, d.n0)) continue;
    const double rho_s = estimated_target(state, sid);
    if (sid == x) rho_x = rho_s;
    const double n_s = static_cast<double>(state.stratum_count(sid));
    target_sum += n_s * rho_s;
    treated += static_cast<double>(state.arm_count(sid, Arm::treatment));
    enrolled += n_s;
  }
  if (treated == 0.0) return coin(1.0, rng, Phase::adaptive);
  if (treated == enrolled) return coin(0.0, rng, Phase::adaptive);
  const double a = rho_x * std::pow(target_sum / treated, d.gamma);
  const double b = (1.0 - rho_x) * std::pow((enrolled - target_sum) / (enrolled - treated), d.gamma);
  return coin(a / (a + b), rng, Phase::adaptive);
}

AssignmentDecision Randomizer::assign_next(const TrialState& state, StratumId x, Rng& rng) {
  if (x.index() >= blocks_.size() || x.index() >= state.num_strata()) {
    throw DomainError("unknown stratum " + std::to_string(x.index() + 1));
  }
  return std::visit(
      overloaded{
          [&](const CompleteRandomization& r) { return coin(r.p, rng, Phase::adaptive); },
          [&](const PermutedBlock& r) {
            return draw_from_block(blocks_[x.index()], r.block_size, rng, Phase::adaptive);
          },
          [&](const EfronBcd& r) {
            const auto n1 = state.total_arm_count(Arm::treatment);
            const auto n0 = state.total_arm_count(Arm::control);
            const double prob = n1 == n0 ? 0.5 : (n1 < n0 ? r.p : 1.0 - r.p);
            return coin(prob, rng, Phase::adaptive);
          },
          [&](const Minimization& r) {
            const double n1 = static_cast<double>(state.arm_count(x, Arm::treatment));
            const double n0 = static_cast<double>(state.arm_count(x, Arm::control));
            const double if_treated = r.weights[0] * std::abs(n1 + 1.0 - n0);
            const double if_control = r.weights[0] * std::abs(n1 - n0 - 1.0);
            const double prob =
                if_treated == if_control ? 0.5 : (if_treated < if_control ? r.p : 1.0 - r.p);
            return coin(prob, rng, Phase::adaptive);
          },
          [&](const StratifiedDbcd& d) { return stratified_dbcd(d, state, x, rng); },
          [&](const Cadbcd& d) { return cadbcd(d, state, x, rng); },
      },
      spec_);
}

namespace {

template <class OnDecision>
TrialState simulate(const RandomizerSpec& spec, const PopulationSpec& pop, std::size_t n, Rng& rng,
                    bool observe_x, OnDecision&& on_decision) {
  const std::size_t design_strata = observe_x ? pop.num_strata() : 1;
  TrialState state(design_strata);
  state.reserve(n);
  Randomizer randomizer(spec, design_strata);
  std::discrete_distribution<std::uint32_t> covariate(pop.strata_probs().begin(),
                                                      pop.strata_probs().end());
  for (std::size_t i = 0; i < n; ++i) {
    const StratumId x_true{covariate(rng)};
    const StratumId x_seen = observe_x ? x_true : StratumId{0};
    const AssignmentDecision d = randomizer.assign_next(state, x_seen, rng);
    const double y = sample_outcome(pop, x_true, d.arm, rng);
    state.record(x_seen, d.arm, y);
    on_decision(d);
  }
  return state;
}

}  // namespace

TrialState run_trial(const RandomizerSpec& spec, const PopulationSpec& pop, std::size_t n, Rng& rng,
                     bool observe_x) {
  return simulate(spec, pop, n, rng, observe_x, [](const AssignmentDecision&) {});
}

TracedTrial run_trial_traced(const RandomizerSpec& spec, const PopulationSpec& pop, std::size_t n,
                             Rng& rng, bool observe_x) {
  std::vector<AssignmentDecision> decisions;
  decisions.reserve(n);
  TrialState state = simulate(spec, pop, n, rng, observe_x,
                              [&](const AssignmentDecision& d) { decisions.push_back(d); });
  return {std::move(state), std::move(decisions)};
}

std::string trace_csv(const TracedTrial& trial) {
  std::ostringstream os;
  os.precision(6);
  os << "index,stratum,arm,prob_used,phase,outcome\n";
  const auto strata = trial.state.strata();
  const auto arms = trial.state.arms();
  const auto outcomes = trial.state.outcomes();
  for (std::size_t i = 0; i < trial.decisions.size(); ++i) {
    os << (i + 1) << ',' << (strata[i] + 1) << ',' << static_cast<int>(arms[i]) << ','
       << trial.decisions[i].prob_used << ',' << phase_name(trial.decisions[i].phase) << ','
       << outcomes[i] << '\n';
  }
  return os.str();
}

}  // namespace cara
