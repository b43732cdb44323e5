#pragma once
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cara/model.hpp"
#include "cara/rng.hpp"
#include "cara/targets.hpp"
#include "cara/trial_state.hpp"

namespace cara {

struct CompleteRandomization {
  double p = 0.5;
};

struct PermutedBlock {
  std::uint32_t block_size = 4;  // even; half of each block goes to each arm
};

// Efron's biased coin on the overall imbalance.
struct EfronBcd {
  double p = 0.75;
};

// Pocock-Simon minimization over the observed covariate (a single factor).
struct Minimization {
  double p = 0.75;
  std::vector<double> weights{1.0};
};

// DBCD run separately inside each stratum.
struct StratifiedDbcd {
  double gamma = 2.0;
  std::uint32_t n0 = 10;
  AllocationTargetSpec target;
};

// Covariate-adjusted DBCD: one correction driven by the average estimated
// target over all enrolled subjects.
struct Cadbcd {
  double gamma = 2.0;
  std::uint32_t n0 = 10;
  AllocationTargetSpec target;
};

using RandomizerSpec =
    std::variant<CompleteRandomization, PermutedBlock, EfronBcd, Minimization, StratifiedDbcd, Cadbcd>;

// Throws DomainError when a parameter violates its invariant.
void validate(const RandomizerSpec& spec);
std::string randomizer_name(const RandomizerSpec& spec);
// Target rule a design steers toward; 1:1 designs report Fixed(p).
AllocationTargetSpec implied_target(const RandomizerSpec& spec);

enum class Phase : std::uint8_t { burn_in, adaptive };

const char* phase_name(Phase phase);

struct AssignmentDecision {
  Arm arm = Arm::control;
  double prob_used = 0.5;
  Phase phase = Phase::adaptive;
};

// Hu-Zhang allocation function:
//   g(0, y) = 1, g(1, y) = 0, otherwise
//   y (y/x)^gamma / [ y (y/x)^gamma + (1-y) ((1-y)/(1-x))^gamma ].
double g_allocation(double x, double y, double gamma);

// Sequential assignment state machine. Owns the design's private state
// (block schedules, last usable target estimates); the shared trial history
// lives in TrialState and is passed in on every call.
class Randomizer {
 public:
  Randomizer(RandomizerSpec spec, std::size_t num_strata);

  // Decides the arm of the next subject, who belongs to stratum x. Does not
  // record the subject in `state`.
  AssignmentDecision assign_next(const TrialState& state, StratumId x, Rng& rng);

  const RandomizerSpec& spec() const { return spec_; }

  // Target estimate for stratum x from the current moments of `state`.
  // Falls back to the last usable estimate of that stratum (initially 1/2)
  // when the rule is undefined at the estimates or a variance-based rule sees
  // a zero sample variance. An infeasible constraint falls back to Neyman.
  double estimated_target(const TrialState& state, StratumId x);

 private:
  struct Block {
    std::uint32_t ones_left = 0;
    std::uint32_t slots_left = 0;
  };

  AssignmentDecision draw_from_block(Block& block, std::uint32_t size, Rng& rng, Phase phase);
  AssignmentDecision stratified_dbcd(const StratifiedDbcd& d, const TrialState& state, StratumId x,
                                     Rng& rng);
  AssignmentDecision cadbcd(const Cadbcd& d, const TrialState& state, StratumId x, Rng& rng);
  const AllocationTargetSpec* target_spec() const;

  RandomizerSpec spec_;
  std::vector<Block> blocks_;
  std::vector<double> last_target_;
};

// Runs one trial of n subjects: X ~ strata probabilities, assignment, then the
// outcome of the assigned arm. With observe_x = false the design sees every
// subject in a single stratum while outcomes still follow the true strata.
TrialState run_trial(const RandomizerSpec& spec, const PopulationSpec& pop, std::size_t n, Rng& rng,
                     bool observe_x = true);

struct TracedTrial {
  TrialState state;
  std::vector<AssignmentDecision> decisions;
};

TracedTrial run_trial_traced(const RandomizerSpec& spec, const PopulationSpec& pop, std::size_t n,
                             Rng& rng, bool observe_x = true);

// CSV rows: index,stratum,arm,prob_used,phase,outcome (stratum 1-based).
std::string trace_csv(const TracedTrial& trial);

}  // namespace cara
