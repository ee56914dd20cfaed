#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "caami/harness/trial.hpp"

namespace caami::harness {

/// Numeric per-trial metrics in report order.
struct MetricColumn {
    const char* name;
    double (*get)(const TrialResult&);
};
const std::vector<MetricColumn>& metric_columns();

/// Stable CSV header: variant, seed, status, error, then metric_columns(),
/// then the degradation placement.
std::vector<std::string> csv_header();
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);

/// Parses what write_trials_csv wrote; one map per data row, keyed by column.
std::vector<std::map<std::string, std::string>> read_trials_csv(std::istream& in);

struct MetricStats {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation, 0 for a single trial
};

struct VariantAggregate {
    int trials = 0;
    int completed = 0;
    int failed = 0;  // trials that raised an error
    std::map<std::string, MetricStats> metrics;
};

std::map<Variant, VariantAggregate> aggregate(const std::vector<TrialResult>& trials);

nlohmann::json summary_json(const Scenario& scenario, const BatchOptions& options,
                            const std::vector<TrialResult>& trials);

/// Writes trials.csv and summary.json into out_dir.
void emit_report(const Scenario& scenario, const BatchOptions& options,
                 const std::vector<TrialResult>& trials, const std::filesystem::path& out_dir);

/// Shortest text that parses back to the same double.
std::string format_double(double x);

}  // namespace caami::harness
