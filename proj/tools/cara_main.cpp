#include <iostream>

#include <CLI11.hpp>

#include "cara/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Covariate-adjusted response-adaptive randomization: bounds, designs, simulations"};
  app.require_subcommand(1);

  cara::SimulateOptions sim;
  std::string sim_out;
  std::size_t sim_workers = 0;
  auto* simulate = app.add_subcommand("simulate", "Run every scenario of a config file");
  simulate->add_option("config", sim.config_path, "Scenario config (YAML)")->required();
  simulate->add_option("--out", sim_out, "Output directory (default: the config's `out`)");
  simulate->add_option("--override", sim.overrides, "Dotted key=value override, repeatable");
  simulate->add_option("--workers", sim_workers, "Worker threads (default: $CARA_WORKERS or all cores)");

  cara::BoundOptions bound;
  std::string bound_config;
  auto* bound_cmd = app.add_subcommand("bound", "Print target allocations and the efficiency bound");
  bound_cmd->add_option("config", bound_config, "Scenario config (YAML) providing the population");
  bound_cmd->add_option("--moments", bound.moments, "Per-stratum mu1,var1,mu0,var0 (repeatable)");
  bound_cmd->add_option("--probs", bound.probs, "Stratum probabilities for --moments")->delimiter(',');
  bound_cmd->add_option("--c", bound.c, "Outcome constraint per stratum, or inf");
  bound_cmd->add_option("--n", bound.n, "Trial size used for bound / n");
  bound_cmd->add_option("--view", bound.view, "pooled, stratified or both (config input only)")
      ->check(CLI::IsMember({"pooled", "stratified", "both"}));
  bound_cmd->add_flag("--json", bound.json, "Machine-readable JSON output");

  cara::TraceOptions trace;
  std::string trace_scenario;
  std::size_t trace_n = 0;
  std::uint64_t trace_seed = 0;
  auto* trace_cmd = app.add_subcommand("trace", "Emit the per-subject assignment trace of one trial");
  trace_cmd->add_option("config", trace.config_path, "Scenario config (YAML)")->required();
  auto* n_opt = trace_cmd->add_option("--n", trace_n, "Number of subjects");
  auto* seed_opt = trace_cmd->add_option("--seed", trace_seed, "Seed");
  trace_cmd->add_option("--rep", trace.rep, "Replication index whose stream to replay");
  auto* scen_opt = trace_cmd->add_option("--scenario", trace_scenario, "Scenario id (default: first)");
  trace_cmd->add_option("--override", trace.overrides, "Dotted key=value override, repeatable");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    if (!sim_out.empty()) sim.out_dir = sim_out;
    if (sim_workers > 0) sim.workers = sim_workers;
    return cara::cmd_simulate(sim, std::cout, std::cerr);
  }
  if (bound_cmd->parsed()) {
    if (!bound_config.empty()) bound.config_path = bound_config;
    return cara::cmd_bound(bound, std::cout, std::cerr);
  }
  if (*n_opt) trace.n = trace_n;
  if (*seed_opt) trace.seed = trace_seed;
  if (*scen_opt) trace.scenario = trace_scenario;
  return cara::cmd_trace(trace, std::cout, std::cerr);
}
