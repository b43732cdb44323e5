#include "cara/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cara/bounds.hpp"
#include "cara/config.hpp"
#include "cara/errors.hpp"
#include "cara/report.hpp"

namespace cara {

namespace fs = std::filesystem;

namespace {

// Every output file starts with the config text and seeds that produced it.
std::string provenance_header(const ConfigFile& cfg) {
  std::ostringstream os;
  os << "# config: " << cfg.path << "\n# seed: " << cfg.defaults.seed << "\n";
  std::istringstream lines(cfg.source);
  for (std::string line; std::getline(lines, line);) os << "# | " << line << "\n";
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw Error("write failed for '" + path.string() + "'");
}

double parse_c(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("constraint must be a number or 'inf', got '" + s + "'");
}

ArmMoments parse_moments(const std::string& s) {
  std::vector<double> v;
  std::istringstream is(s);
  for (std::string part; std::getline(is, part, ',');) {
    try {
      v.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + part + "' in moments '" + s + "'");
    }
  }
  if (v.size() != 4) throw ConfigError("moments need four values mu1,var1,mu0,var0: '" + s + "'");
  ArmMoments m{v[0], v[1], v[2], v[3]};
  validate(m);
  return m;
}

nlohmann::json view_json(const std::string& name, const MomentTable& table, const ConstraintBound& b,
                         std::size_t n) {
  nlohmann::json strata = nlohmann::json::array();
  for (std::size_t x = 0; x < table.size(); ++x) {
    const auto& m = table.strata[x];
    const double rho = b.alloc.pi[x];
    strata.push_back({{"stratum", x + 1},
                      {"prob", table.probs[x]},
                      {"rho", rho},
                      {"active", static_cast<bool>(b.active[x])},
                      {"expected_outcome", rho * m.mu1 + (1.0 - rho) * m.mu0}});
  }
  return {{"view", name},
          {"strata", strata},
          {"bound", b.bound},
          {"bound_per_trial", b.bound / static_cast<double>(n)}};
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ConfigFile cfg = load_config(opts.config_path, opts.overrides);
    const fs::path dir = opts.out_dir.value_or(cfg.defaults.out);
    fs::create_directories(dir);
    const std::string header = provenance_header(cfg);

    std::vector<SummaryReport> reports;
    for (ScenarioConfig sc : cfg.scenarios) {
      if (opts.workers) sc.workers = *opts.workers;
      err << "[" << sc.id << "] " << randomizer_name(sc.randomizer) << ", n=" << sc.n
          << ", reps=" << sc.reps << " ..." << std::flush;
      std::vector<ReplicationResult> reps;
      SummaryReport report;
      try {
        report = run_scenario(sc, &reps);
      } catch (const InfeasibleError& e) {
        err << "\nscenario '" << sc.id << "' is infeasible: " << e.what() << "\n";
        return 3;
      }
      err << " done" << (report.invalid ? " (INVALID: too many failed replications)" : "")
          << (report.failed ? " failed=" + std::to_string(report.failed) : "") << "\n";
      write_file(dir / (sc.id + ".csv"), header + emit_report(report, ReportFormat::csv));
      write_file(dir / (sc.id + "_replications.csv"),
                 header + replications_csv(reps, sc.estimators));
      reports.push_back(std::move(report));
    }
    const std::string table = emit_reports(reports, ReportFormat::csv);
    write_file(dir / "table.csv", header + table);
    write_file(dir / "table.json", emit_reports(reports, ReportFormat::json));
    out << table;
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_bound(const BoundOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const double c = parse_c(opts.c);
    if (opts.n == 0) throw ConfigError("n must be >= 1");
    std::vector<std::pair<std::string, MomentTable>> views;
    if (opts.config_path) {
      const ConfigFile cfg = load_config(*opts.config_path);
      if (opts.view == "pooled" || opts.view == "both") {
        views.emplace_back("pooled", pooled_moments(cfg.population));
      }
      if (opts.view == "stratified" || opts.view == "both") {
        views.emplace_back("stratified", stratified_moments(cfg.population));
      }
      if (views.empty()) throw ConfigError("view must be pooled, stratified or both");
    } else {
      if (opts.moments.empty()) throw ConfigError("give a config file or --moments");
      MomentTable table;
      for (const auto& m : opts.moments) table.strata.push_back(parse_moments(m));
      if (opts.probs.empty()) {
        table.probs.assign(table.size(), 1.0 / static_cast<double>(table.size()));
      } else {
        if (opts.probs.size() != table.size()) {
          throw ConfigError("--probs must give one probability per --moments entry");
        }
        double total = 0.0;
        for (double p : opts.probs) total += p;
        if (std::abs(total - 1.0) > 1e-9) throw ConfigError("--probs must sum to 1");
        table.probs = opts.probs;
      }
      views.emplace_back(table.size() == 1 ? "pooled" : "stratified", table);
    }

    nlohmann::json doc = {{"c", std::isinf(c) ? nlohmann::json("inf") : nlohmann::json(c)},
                          {"n", opts.n},
                          {"views", nlohmann::json::array()}};
    for (const auto& [name, table] : views) {
      ConstraintBound b;
      try {
        b = bound_for_constraint(table, c);
      } catch (const InfeasibleError& e) {
        err << "infeasible (" << name << " view): " << e.what() << "\n";
        return 3;
      }
      doc["views"].push_back(view_json(name, table, b, opts.n));
    }

    if (opts.json) {
      out << doc.dump(2) << "\n";
      return 0;
    }
    out << "c = " << opts.c << ", n = " << opts.n << "\n";
    for (const auto& v : doc["views"]) {
      out << "[" << v["view"].get<std::string>() << "]\n";
      out << "stratum,prob,rho,active,expected_outcome\n";
      for (const auto& s : v["strata"]) {
        out << s["stratum"].get<int>() << ',' << format_number(s["prob"].get<double>()) << ','
            << format_number(s["rho"].get<double>()) << ',' << (s["active"].get<bool>() ? 1 : 0)
            << ',' << format_number(s["expected_outcome"].get<double>()) << "\n";
      }
      out << "bound," << format_number(v["bound"].get<double>()) << "\n";
      out << "bound_per_trial," << format_number(v["bound_per_trial"].get<double>()) << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_trace(const TraceOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ConfigFile cfg = load_config(opts.config_path, opts.overrides);
    const ScenarioConfig& sc = opts.scenario ? cfg.scenario(*opts.scenario) : cfg.scenarios.front();
    Rng rng = make_stream(opts.seed.value_or(sc.base_seed), opts.rep);
    const TracedTrial trial =
        run_trial_traced(sc.randomizer, sc.pop, opts.n.value_or(sc.n), rng, sc.observe_x);
    out << trace_csv(trial);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cara
