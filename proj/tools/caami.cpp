#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "caami/bridge/server.hpp"
#include "caami/harness/report.hpp"
#include "caami/harness/trial.hpp"

using namespace caami;
using namespace caami::harness;

namespace {

Variant variant_arg(const std::string& text) {
    const auto v = parse_variant(text);
    if (!v) throw CLI::ValidationError("variant", "unknown variant '" + text + "'");
    return *v;
}

std::vector<Variant> variant_list(const std::string& text) {
    std::vector<Variant> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(variant_arg(item));
    }
    if (out.empty()) throw CLI::ValidationError("variants", "empty variant list");
    return out;
}

void print_metrics(const TrialResult& r) {
    const RunMetrics& m = r.metrics;
    std::cout << to_string(r.variant) << " seed " << r.seed << ": " << to_string(m.status)
              << " in " << m.completion_time << " s, switches " << m.switches_total << " (ai "
              << m.switches_ai << ", human " << m.switches_human << "), unattended interruptions "
              << m.ai_interruptions_unattended << ", items " << m.secondary.items_completed << "/"
              << m.secondary.items_presented << ", collisions " << m.collisions << '\n';
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-autonomy navigation simulator with attention-aware mixed initiative"};
    app.require_subcommand(1);

    std::string scenario_path, variant_text, variants_text = "mi,caa-mi", out_dir, log_path;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_base = 1;
    int runs = 1;
    bool quiet = false, resimulate = false;

    auto* run = app.add_subcommand("run", "Run one headless trial with the scripted operator");
    run->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--variant", variant_text, "mi | caa-mi | teleop | autonomy (default: scenario)");
    run->add_option("--seed", seed, "Trial seed (default: scenario)");
    run->add_option("--out", out_dir, "Output directory")->required();

    auto* batch = app.add_subcommand("batch", "Run paired-seed trials and write a report");
    batch->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    batch->add_option("--variants", variants_text, "Comma-separated variants")->capture_default_str();
    batch->add_option("--runs", runs, "Seeds per variant")->check(CLI::NonNegativeNumber)->capture_default_str();
    batch->add_option("--seed-base", seed_base, "First seed")->capture_default_str();
    batch->add_option("--out", out_dir, "Output directory")->required();
    batch->add_flag("--quiet", quiet, "No per-trial progress");

    auto* replay = app.add_subcommand("replay", "Re-derive metrics from a decision log");
    replay->add_option("--log", log_path, "Decision log (JSON lines)")->required()->check(CLI::ExistingFile);
    replay->add_flag("--resimulate", resimulate,
                     "Also re-run the logged commands and require a byte-identical log");

    std::string address = "127.0.0.1";
    unsigned short port = 8765;
    double realtime_factor = 1.0;
    std::string serve_log_dir;
    auto* serve = app.add_subcommand("serve", "Serve a live session to the operator console");
    serve->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    serve->add_option("--port", port, "TCP port (0 picks one)")->capture_default_str();
    serve->add_option("--address", address, "Bind address")->capture_default_str();
    serve->add_option("--realtime-factor", realtime_factor, "Simulated seconds per wall second")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    serve->add_option("--variant", variant_text, "Variant (default: scenario)");
    serve->add_option("--seed", seed, "Seed (default: scenario)");
    serve->add_option("--log-dir", serve_log_dir, "Write each trial's decision log here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*replay) {
            std::ifstream in(log_path, std::ios::binary);
            const ReplayResult r = replay_log(in);
            print_metrics({r.variant, r.seed, {}, r.metrics, std::nullopt});
            if (!r.logged) std::cout << "no end record: trial incomplete\n";
            for (const auto& m : r.mismatches) std::cout << "mismatch: " << m << '\n';
            bool ok = r.consistent();
            if (resimulate) {
                const std::string original = slurp(log_path);
                std::istringstream again(original);
                const bool same = resimulate_log(again) == original;
                std::cout << "resimulation " << (same ? "identical" : "DIFFERS") << '\n';
                ok = ok && same;
            }
            return ok ? 0 : 1;
        }

        const Scenario scenario = load_scenario(scenario_path);
        const Variant variant = variant_text.empty() ? scenario.variant : variant_arg(variant_text);
        const std::uint64_t trial_seed = seed.value_or(scenario.seed);

        if (*run) {
            const std::filesystem::path out(out_dir);
            std::filesystem::create_directories(out / "logs");
            std::ofstream log(out / "logs" / log_file_name(variant, trial_seed), std::ios::binary);
            const TrialResult r = run_trial(scenario, variant, trial_seed, &log);
            BatchOptions o;
            o.variants = {variant};
            o.seed_base = trial_seed;
            emit_report(scenario, o, {r}, out);
            print_metrics(r);
            return 0;
        }

        if (*batch) {
            BatchOptions o;
            o.variants = variant_list(variants_text);
            o.runs = runs;
            o.seed_base = seed_base;
            o.log_dir = std::filesystem::path(out_dir) / "logs";
            if (!quiet) {
                o.on_trial = [](const TrialResult& r) {
                    if (r.error) {
                        std::cerr << to_string(r.variant) << " seed " << r.seed
                                  << ": error: " << *r.error << '\n';
                    } else {
                        print_metrics(r);
                    }
                };
            }
            const auto results = run_batch(scenario, o);
            emit_report(scenario, o, results, out_dir);
            for (const auto& [v, a] : aggregate(results)) {
                std::cout << to_string(v) << ": " << a.completed << "/" << a.trials
                          << " completed, mean switches " << a.metrics.at("switches_total").mean
                          << ", mean items " << a.metrics.at("items_completed").mean << '\n';
            }
            return 0;
        }

        if (*serve) {
            bridge::LiveSession session(scenario, variant, trial_seed,
                                        std::filesystem::path(scenario_path).parent_path());
            bridge::ServerOptions o;
            o.address = address;
            o.port = port;
            o.realtime_factor = realtime_factor;
            if (!serve_log_dir.empty()) o.log_dir = serve_log_dir;
            bridge::BridgeServer server(session, o);
            const unsigned short bound = server.start();
            std::cout << "listening on ws://" << address << ":" << bound << '\n' << std::flush;
            server.wait();
            server.stop();
            return 0;
        }
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return 2;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const bridge::BindError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
