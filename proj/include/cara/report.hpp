#pragma once
#include <string>
#include <vector>

#include "cara/harness.hpp"

namespace cara {

enum class ReportFormat { csv, json };

// Stable column order: scenario, randomizer, c, bound, c_tilde, c_tilde_x...,
// dim_bias, dim_variance, sdim_bias, sdim_variance, failed, seed, then
// metadata. Numbers carry 6 significant digits; missing values are empty.
std::string emit_report(const SummaryReport& report, ReportFormat format);

// One table over several scenarios. An empty list gives a header-only CSV
// (or an empty JSON array).
std::string emit_reports(const std::vector<SummaryReport>& reports, ReportFormat format);

std::vector<std::string> csv_columns(const std::vector<SummaryReport>& reports);

// Inverse of emit_report(..., json). Throws ConfigError on malformed input.
SummaryReport report_from_json(const std::string& text);

// Raw per-replication rows for plotting tools.
std::string replications_csv(const std::vector<ReplicationResult>& results,
                             const std::vector<Estimator>& estimators);

// "%.6g"-style formatting; +/-inf as "inf"/"-inf", NaN as "".
std::string format_number(double v);

}  // namespace cara
