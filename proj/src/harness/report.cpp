#include "caami/harness/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace caami::harness {

std::string format_double(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
}

const std::vector<MetricColumn>& metric_columns() {
    static const std::vector<MetricColumn> columns{
        {"completion_time", [](const TrialResult& r) { return r.metrics.completion_time; }},
        {"switches_total", [](const TrialResult& r) { return double(r.metrics.switches_total); }},
        {"switches_ai", [](const TrialResult& r) { return double(r.metrics.switches_ai); }},
        {"switches_human", [](const TrialResult& r) { return double(r.metrics.switches_human); }},
        {"ai_interruptions_unattended",
         [](const TrialResult& r) { return double(r.metrics.ai_interruptions_unattended); }},
        {"time_in_teleop", [](const TrialResult& r) { return r.metrics.time_in_teleop; }},
        {"time_in_autonomy", [](const TrialResult& r) { return r.metrics.time_in_autonomy; }},
        {"collisions", [](const TrialResult& r) { return double(r.metrics.collisions); }},
        {"waypoints_reached",
         [](const TrialResult& r) { return double(r.metrics.waypoints_reached); }},
        {"items_presented",
         [](const TrialResult& r) { return double(r.metrics.secondary.items_presented); }},
        {"items_completed",
         [](const TrialResult& r) { return double(r.metrics.secondary.items_completed); }},
        {"interruptions",
         [](const TrialResult& r) { return double(r.metrics.secondary.interruptions); }},
    };
    return columns;
}

std::vector<std::string> csv_header() {
    std::vector<std::string> h{"variant", "seed", "status", "error"};
    for (const auto& c : metric_columns()) h.emplace_back(c.name);
    for (const char* c : {"noise_start", "noise_end", "phantom_rate", "distraction_start",
                          "distraction_end"}) {
        h.emplace_back(c);
    }
    return h;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
    const auto header = csv_header();
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : trials) {
        out << to_string(r.variant) << ',' << r.seed << ','
            << (r.error ? "error" : to_string(r.metrics.status)) << ','
            << csv_escape(r.error.value_or(""));
        for (const auto& c : metric_columns()) out << ',' << format_double(c.get(r));
        const auto& d = r.degradation;
        for (double x : {d.noise.start, d.noise.end, d.noise.phantom_rate, d.distraction.start,
                         d.distraction.end}) {
            out << ',' << format_double(x);
        }
        out << '\n';
    }
}

std::vector<std::map<std::string, std::string>> read_trials_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    const auto header = split_csv_line(line);
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error("CSV row has " + std::to_string(fields.size()) +
                                     " fields, expected " + std::to_string(header.size()));
        }
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::map<Variant, VariantAggregate> aggregate(const std::vector<TrialResult>& trials) {
    std::map<Variant, VariantAggregate> out;
    std::map<Variant, std::vector<const TrialResult*>> ok;
    for (const auto& r : trials) {
        auto& a = out[r.variant];
        ++a.trials;
        if (r.error) {
            ++a.failed;
            continue;
        }
        if (r.metrics.status == TrialStatus::Completed) ++a.completed;
        ok[r.variant].push_back(&r);
    }
    for (auto& [v, a] : out) {
        const auto& rs = ok[v];
        for (const auto& c : metric_columns()) {
            MetricStats s;
            if (!rs.empty()) {
                for (const auto* r : rs) s.mean += c.get(*r);
                s.mean /= static_cast<double>(rs.size());
                if (rs.size() > 1) {
                    double ss = 0.0;
                    for (const auto* r : rs) ss += (c.get(*r) - s.mean) * (c.get(*r) - s.mean);
                    s.sd = std::sqrt(ss / static_cast<double>(rs.size() - 1));
                }
            }
            a.metrics[c.name] = s;
        }
    }
    return out;
}

nlohmann::json summary_json(const Scenario& scenario, const BatchOptions& options,
                            const std::vector<TrialResult>& trials) {
    nlohmann::json variants = nlohmann::json::object();
    for (const auto& [v, a] : aggregate(trials)) {
        nlohmann::json metrics = nlohmann::json::object();
        for (const auto& [name, s] : a.metrics) metrics[name] = {{"mean", s.mean}, {"sd", s.sd}};
        nlohmann::json failed_seeds = nlohmann::json::array();
        for (const auto& r : trials) {
            if (r.variant == v && r.error) failed_seeds.push_back(r.seed);
        }
        variants[std::string(to_string(v))] = {{"trials", a.trials},
                                               {"completed", a.completed},
                                               {"failed", a.failed},
                                               {"failed_seeds", failed_seeds},
                                               {"metrics", metrics}};
    }
    nlohmann::json variant_list = nlohmann::json::array();
    for (Variant v : options.variants) variant_list.push_back(std::string(to_string(v)));
    return {{"scenario", scenario.name},
            {"runs", options.runs},
            {"seed_base", options.seed_base},
            {"variants", variant_list},
            {"results", variants}};
}

void emit_report(const Scenario& scenario, const BatchOptions& options,
                 const std::vector<TrialResult>& trials, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir / "trials.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + (out_dir / "trials.csv").string());
        write_trials_csv(csv, trials);
    }
    std::ofstream summary(out_dir / "summary.json", std::ios::binary);
    if (!summary) throw std::runtime_error("cannot write " + (out_dir / "summary.json").string());
    summary << summary_json(scenario, options, trials).dump(2) << '\n';
}

}  // namespace caami::harness
