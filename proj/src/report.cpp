#include "cara/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "cara/errors.hpp"

namespace cara {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t strata_columns(const SummaryReport& r) {
  return r.observe_x ? r.stratum_mean_outcome.size() : 0;
}

// JSON has no inf/NaN; encode them as strings / null.
json number_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_null()) return kNaN;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ConfigError("unexpected string where a number was expected: " + s);
  }
  return j.get<double>();
}

json numbers_to_json(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number_to_json(x));
  return a;
}

std::vector<double> numbers_from_json(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x));
  return out;
}

json to_json(const SummaryReport& r) {
  json est = json::array();
  for (const auto& e : r.estimators) {
    est.push_back({{"estimator", estimator_name(e.estimator)},
                   {"mean", number_to_json(e.mean)},
                   {"bias", number_to_json(e.bias)},
                   {"variance", number_to_json(e.variance)},
                   {"scaled_variance", number_to_json(e.scaled_variance)}});
  }
  const auto& t = r.truth;
  return {
      {"scenario", r.scenario_id},
      {"randomizer", r.randomizer},
      {"c", number_to_json(r.constraint_c)},
      {"n", r.n},
      {"reps", r.reps},
      {"ok_reps", r.ok_reps},
      {"failed", r.failed},
      {"invalid", r.invalid},
      {"low_power", r.low_power},
      {"seed", r.base_seed},
      {"observe_x", r.observe_x},
      {"bound", number_to_json(r.bound_per_trial)},
      {"truth",
       {{"true_ate", number_to_json(t.true_ate)},
        {"targets", numbers_to_json(t.targets)},
        {"expected_outcome", numbers_to_json(t.expected_outcome)},
        {"design_variance", number_to_json(t.design_variance)},
        {"asymptotic_bound", number_to_json(t.bound)},
        {"optimal_alloc", numbers_to_json(t.optimal_alloc)},
        {"active", t.active}}},
      {"estimators", est},
      {"c_tilde", number_to_json(r.mean_outcome)},
      {"c_tilde_x", numbers_to_json(r.stratum_mean_outcome)},
      {"allocation", numbers_to_json(r.mean_allocation)},
      {"config", r.config_echo},
      {"generated_at", r.generated_at},
  };
}

void append_csv_row(std::ostringstream& os, const SummaryReport& r, std::size_t k) {
  auto cell = [&](const std::string& s) { os << ',' << s; };
  os << r.scenario_id;
  cell(r.randomizer);
  cell(format_number(r.constraint_c));
  cell(format_number(r.bound_per_trial));
  cell(format_number(r.mean_outcome));
  for (std::size_t x = 0; x < k; ++x) {
    cell(x < strata_columns(r) ? format_number(r.stratum_mean_outcome[x]) : "");
  }
  for (Estimator e : {Estimator::dim, Estimator::sdim}) {
    const EstimatorSummary* s = r.find(e);
    cell(s ? format_number(s->bias) : "");
    cell(s ? format_number(s->variance) : "");
  }
  cell(std::to_string(r.failed));
  cell(std::to_string(r.base_seed));
  cell(std::to_string(r.n));
  cell(std::to_string(r.reps));
  cell(format_number(r.truth.bound));
  for (Estimator e : {Estimator::dim, Estimator::sdim}) {
    const EstimatorSummary* s = r.find(e);
    cell(s ? format_number(s->scaled_variance) : "");
  }
  cell(r.invalid ? "1" : "0");
  os << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> csv_columns(const std::vector<SummaryReport>& reports) {
  std::size_t k = 0;
  for (const auto& r : reports) k = std::max(k, strata_columns(r));
  std::vector<std::string> cols{"scenario", "randomizer", "c", "bound", "c_tilde"};
  for (std::size_t x = 0; x < k; ++x) cols.push_back("c_tilde_" + std::to_string(x + 1));
  for (const char* c : {"dim_bias", "dim_variance", "sdim_bias", "sdim_variance", "failed", "seed",
                        "n", "reps", "asymptotic_bound", "dim_n_variance", "sdim_n_variance",
                        "invalid"}) {
    cols.emplace_back(c);
  }
  return cols;
}

std::string emit_reports(const std::vector<SummaryReport>& reports, ReportFormat format) {
  if (format == ReportFormat::json) {
    json a = json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    return a.dump(2) + "\n";
  }
  std::ostringstream os;
  const auto cols = csv_columns(reports);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  std::size_t k = 0;
  for (const auto& r : reports) k = std::max(k, strata_columns(r));
  for (const auto& r : reports) append_csv_row(os, r, k);
  return os.str();
}

std::string emit_report(const SummaryReport& report, ReportFormat format) {
  if (format == ReportFormat::json) return to_json(report).dump(2) + "\n";
  return emit_reports({report}, format);
}

SummaryReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    SummaryReport r;
    r.scenario_id = j.at("scenario").get<std::string>();
    r.randomizer = j.at("randomizer").get<std::string>();
    r.constraint_c = number_from_json(j.at("c"));
    r.n = j.at("n").get<std::size_t>();
    r.reps = j.at("reps").get<std::size_t>();
    r.ok_reps = j.at("ok_reps").get<std::size_t>();
    r.failed = j.at("failed").get<std::size_t>();
    r.invalid = j.at("invalid").get<bool>();
    r.low_power = j.at("low_power").get<bool>();
    r.base_seed = j.at("seed").get<std::uint64_t>();
    r.observe_x = j.at("observe_x").get<bool>();
    r.bound_per_trial = number_from_json(j.at("bound"));
    const json& t = j.at("truth");
    r.truth.true_ate = number_from_json(t.at("true_ate"));
    r.truth.targets = numbers_from_json(t.at("targets"));
    r.truth.expected_outcome = numbers_from_json(t.at("expected_outcome"));
    r.truth.design_variance = number_from_json(t.at("design_variance"));
    r.truth.bound = number_from_json(t.at("asymptotic_bound"));
    r.truth.optimal_alloc = numbers_from_json(t.at("optimal_alloc"));
    r.truth.active = t.at("active").get<std::vector<bool>>();
    for (const auto& e : j.at("estimators")) {
      const auto name = e.at("estimator").get<std::string>();
      EstimatorSummary s;
      if (name == "dim") {
        s.estimator = Estimator::dim;
      } else if (name == "sdim") {
        s.estimator = Estimator::sdim;
      } else {
        throw ConfigError("unknown estimator '" + name + "'");
      }
      s.mean = number_from_json(e.at("mean"));
      s.bias = number_from_json(e.at("bias"));
      s.variance = number_from_json(e.at("variance"));
      s.scaled_variance = number_from_json(e.at("scaled_variance"));
      r.estimators.push_back(s);
    }
    r.mean_outcome = number_from_json(j.at("c_tilde"));
    r.stratum_mean_outcome = numbers_from_json(j.at("c_tilde_x"));
    r.mean_allocation = numbers_from_json(j.at("allocation"));
    r.config_echo = j.at("config").get<std::string>();
    r.generated_at = j.at("generated_at").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string replications_csv(const std::vector<ReplicationResult>& results,
                             const std::vector<Estimator>& estimators) {
  std::ostringstream os;
  const std::size_t k = results.empty() ? 0 : results.front().stratum_mean.size();
  os << "rep,ok";
  for (Estimator e : estimators) os << ',' << estimator_name(e);
  os << ",c_tilde";
  for (std::size_t x = 0; x < k; ++x) os << ",c_tilde_" << (x + 1);
  for (std::size_t x = 0; x < k; ++x) os << ",allocation_" << (x + 1);
  os << '\n';
  for (const auto& r : results) {
    os << r.rep_index << ',' << (r.ok ? 1 : 0);
    for (double v : r.estimates) os << ',' << format_number(v);
    os << ',' << format_number(r.mean_outcome);
    for (double v : r.stratum_mean) os << ',' << format_number(v);
    for (double v : r.allocation) os << ',' << format_number(v);
    os << '\n';
  }
  return os.str();
}

}  // namespace cara
