#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "caami/harness/engine.hpp"

namespace caami::harness {

struct TrialResult {
    Variant variant = Variant::CaaMi;
    std::uint64_t seed = 0;
    Degradation degradation;
    RunMetrics metrics;
    std::optional<std::string> error;  // set when the trial could not run
};

/// Runs one headless trial with the scripted operator. Writes the decision
/// log (JSON lines) to `log` when given. Throws ScenarioError if a goal
/// turns out to be unreachable.
TrialResult run_trial(const Scenario& scenario, Variant variant, std::uint64_t seed,
                      std::ostream* log = nullptr);

struct BatchOptions {
    std::vector<Variant> variants{Variant::Mi, Variant::CaaMi};
    int runs = 1;
    std::uint64_t seed_base = 1;
    /// When set, one decision log per trial is written here.
    std::optional<std::filesystem::path> log_dir;
    std::function<void(const TrialResult&)> on_trial;
};

/// Seeds seed_base .. seed_base + runs - 1, every variant on every seed.
/// Results are ordered by seed, then by variant as listed.
std::vector<TrialResult> run_batch(const Scenario& scenario, const BatchOptions& options);

std::string log_file_name(Variant variant, std::uint64_t seed);

struct ReplayResult {
    RunMetrics metrics;              // re-derived from tick, switch and leg records
    std::optional<RunMetrics> logged;  // from the end record, if present
    std::vector<std::string> mismatches;
    Variant variant = Variant::CaaMi;
    std::uint64_t seed = 0;

    bool consistent() const { return mismatches.empty(); }
};

/// Re-derives trial metrics from a decision log without re-simulating and
/// compares them with the logged end record. Throws std::runtime_error on a
/// malformed log.
ReplayResult replay_log(std::istream& log);

/// Re-runs the trial described by a decision log by feeding its recorded
/// commands back into a fresh engine at the same ticks, and returns the new
/// log text. For a faithful log the result is byte-identical to the input.
std::string resimulate_log(std::istream& log);

}  // namespace caami::harness
