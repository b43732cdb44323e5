#include "cara/estimation.hpp"

#include <array>
#include <string>
#include <vector>

#include "cara/errors.hpp"

namespace cara {

namespace {

struct CellSums {
  std::array<double, 2> sum{0.0, 0.0};
  std::array<std::size_t, 2> count{0, 0};
};

// Plain sums straight from the history, independent of the running moments
// used by the designs.
std::vector<CellSums> cell_sums(const TrialState& state) {
  std::vector<CellSums> cells(state.num_strata());
  const auto strata = state.strata();
  const auto arms = state.arms();
  const auto outcomes = state.outcomes();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& c = cells[strata[i]];
    c.sum[arms[i]] += outcomes[i];
    ++c.count[arms[i]];
  }
  return cells;
}

}  // namespace

double dim_estimate(const TrialState& state) {
  std::array<double, 2> sum{0.0, 0.0};
  std::array<std::size_t, 2> count{0, 0};
  const auto arms = state.arms();
  const auto outcomes = state.outcomes();
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    sum[arms[i]] += outcomes[i];
    ++count[arms[i]];
  }
  if (count[0] == 0 || count[1] == 0) throw EstimationError("difference in means: an arm is empty");
  return sum[1] / static_cast<double>(count[1]) - sum[0] / static_cast<double>(count[0]);
}

double stratified_dim_estimate(const TrialState& state) {
  if (state.size() == 0) throw EstimationError("stratified difference in means: empty trial");
  const auto cells = cell_sums(state);
  const double n = static_cast<double>(state.size());
  double tau = 0.0;
  for (std::size_t x = 0; x < cells.size(); ++x) {
    const auto& c = cells[x];
    const std::size_t nx = c.count[0] + c.count[1];
    if (nx == 0) continue;
    if (c.count[0] == 0 || c.count[1] == 0) {
      throw EstimationError("stratified difference in means: stratum " + std::to_string(x + 1) +
                            " has an empty arm");
    }
    const double gap = c.sum[1] / static_cast<double>(c.count[1]) -
                       c.sum[0] / static_cast<double>(c.count[0]);
    tau += (static_cast<double>(nx) / n) * gap;
  }
  return tau;
}

double plug_in_variance(const TrialState& state) {
  if (state.size() == 0) throw EstimationError("plug-in variance: empty trial");
  const double n = static_cast<double>(state.size());
  std::vector<double> weight;
  std::vector<double> gap;
  double within = 0.0;
  for (std::uint32_t x = 0; x < state.num_strata(); ++x) {
    const StratumId sid{x};
    const std::size_t nx = state.stratum_count(sid);
    if (nx == 0) continue;
    const auto& e1 = state.estimate(sid, Arm::treatment);
    const auto& e0 = state.estimate(sid, Arm::control);
    if (e1.count < 2 || e0.count < 2) {
      throw EstimationError("plug-in variance: stratum " + std::to_string(x + 1) +
                            " needs two subjects per arm");
    }
    const double share = static_cast<double>(nx) / n;
    const double prop1 = static_cast<double>(e1.count) / static_cast<double>(nx);
    within += share * (*e1.variance() / prop1 + *e0.variance() / (1.0 - prop1));
    weight.push_back(share);
    gap.push_back(e1.mean - e0.mean);
  }
  double mean_gap = 0.0;
  for (std::size_t k = 0; k < gap.size(); ++k) mean_gap += weight[k] * gap[k];
  double between = 0.0;
  for (std::size_t k = 0; k < gap.size(); ++k) {
    between += weight[k] * (gap[k] - mean_gap) * (gap[k] - mean_gap);
  }
  return within + between;
}

}  // namespace cara
