#pragma once
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cara {

struct SimulateOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  // defaults to the config's `out`
  std::vector<std::string> overrides;
  std::optional<std::size_t> workers;
};

// Runs every scenario; writes <out>/<id>.csv, <out>/<id>_replications.csv,
// <out>/table.csv and <out>/table.json. The combined CSV also goes to `out`.
// Progress goes to `err`. Returns the process exit status.
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

struct BoundOptions {
  std::optional<std::string> config_path;
  std::vector<std::string> moments;  // "mu1,var1,mu0,var0" per stratum
  std::vector<double> probs;         // stratum probabilities for inline moments
  std::string c = "inf";
  std::size_t n = 500;
  std::string view = "both";  // pooled | stratified | both
  bool json = false;
};

int cmd_bound(const BoundOptions& opts, std::ostream& out, std::ostream& err);

struct TraceOptions {
  std::string config_path;
  std::optional<std::string> scenario;  // defaults to the first scenario
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::size_t rep = 0;  // replication stream, as in simulate
  std::vector<std::string> overrides;
};

int cmd_trace(const TraceOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace cara
