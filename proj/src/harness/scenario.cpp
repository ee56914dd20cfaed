#include "caami/harness/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>

#include "caami/nav/planner.hpp"
#include "caami/world/random.hpp"

namespace caami::harness {

using nlohmann::json;

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::Mi: return "mi";
        case Variant::CaaMi: return "caa-mi";
        case Variant::TeleopOnly: return "teleop";
        case Variant::AutonomyOnly: return "autonomy";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view text) {
    for (Variant v : {Variant::Mi, Variant::CaaMi, Variant::TeleopOnly, Variant::AutonomyOnly}) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

void Scenario::validate() const {
    auto fail = [&](const std::string& what) { throw ScenarioError(name + ": " + what); };
    if (!(tick_rate > 0.0)) fail("tick_rate must be positive");
    if (!(timeout > 0.0)) fail("timeout must be positive");
    if (!(waypoint_radius > 0.0)) fail("waypoint_radius must be positive");
    if (!(teleop_hold >= 0.0)) fail("teleop_hold must be non-negative");
    if (!(phantom_rate >= 0.0 && phantom_rate <= 1.0)) fail("phantom_rate must be in [0, 1]");
    if (laser.beams <= 0 || !(laser.max_range > 0.0)) fail("laser needs beams and a range");
    if (waypoints.empty()) fail("no waypoints");
    if (!arena.waypoints.contains(start_label)) {
        fail(std::string("start label '") + start_label + "' is not on the map");
    }
    if (random_overlap) {
        const auto& o = *random_overlap;
        if (!(o.noise_length > 0.0 && o.distraction_length > 0.0 &&
              o.distraction_length <= o.noise_length && o.noise_start_min >= 0.0 &&
              o.noise_start_min <= o.noise_start_max)) {
            fail("random_overlap needs 0 < distraction_length <= noise_length and min <= max");
        }
    }
    if (!noise && !random_overlap) fail("noise is unset and no random_overlap directive given");
    if (!distraction && !random_overlap) {
        fail("distraction is unset and no random_overlap directive given");
    }
    try {
        if (noise) noise->validate();
        if (distraction) distraction->validate();
        operator_profile.validate();
        controller.membership.validate();
        attention.calibration.validate();
        if (!(attention.alpha > 0.0 && attention.alpha <= 1.0)) fail("attention alpha not in (0, 1]");
    } catch (const ScenarioError&) {
        throw;
    } catch (const std::exception& e) {
        fail(e.what());
    }
    world::CellIndex from = start_cell();
    for (char label : waypoints) {
        const auto it = arena.waypoints.find(label);
        if (it == arena.waypoints.end()) {
            fail(std::string("waypoint '") + label + "' is not on the map");
        }
        if (!nav::plan(arena.grid, from, it->second)) {
            fail(std::string("waypoint '") + label + "' is unreachable");
        }
        from = it->second;
    }
}

Degradation place_degradation(const Scenario& sc, std::uint64_t seed) {
    Degradation d;
    Rng rng = make_stream(seed, stream::placement);
    const OverlapDirective o = sc.random_overlap.value_or(OverlapDirective{});
    if (sc.noise) {
        d.noise = *sc.noise;
    } else {
        std::uniform_real_distribution<double> start(o.noise_start_min, o.noise_start_max);
        const double s = start(rng);
        d.noise = {s, s + o.noise_length, sc.phantom_rate};
    }
    if (sc.distraction) {
        d.distraction = *sc.distraction;
    } else {
        const double len = std::min(o.distraction_length, d.noise.end - d.noise.start);
        std::uniform_real_distribution<double> start(d.noise.start, d.noise.end - len);
        const double s = start(rng);
        d.distraction = {s, s + len, sc.head_turn_yaw, sc.item_period};
    }
    return d;
}

namespace {

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) throw ScenarioError(std::string(where) + " must be an object");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (auto allowed : keys) known |= (k == allowed);
        if (!known) throw ScenarioError("unknown key '" + k + "' in " + std::string(where));
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<std::string> read_map_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open map " + path.string());
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) rows.push_back(line);
    }
    return rows;
}

}  // namespace

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
    Scenario sc;
    try {
        check_keys(j, "scenario",
                   {"name", "map", "map_rows", "resolution", "start", "waypoints", "variant", "seed",
                    "tick_rate", "timeout", "waypoint_radius", "teleop_hold", "belief_decay",
                    "phantom_rate", "noise", "distraction", "random_overlap", "head_turn_yaw",
                    "item_period", "laser", "operator", "controller", "attention"});
        read(j, "name", sc.name);
        read(j, "resolution", sc.resolution);
        if (j.contains("map_rows")) {
            sc.map_rows = j.at("map_rows").get<std::vector<std::string>>();
        } else if (j.contains("map")) {
            std::filesystem::path p = j.at("map").get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            sc.map_rows = read_map_file(p);
        } else {
            throw ScenarioError("scenario needs 'map' or 'map_rows'");
        }
        sc.arena = world::parse_arena(sc.map_rows, sc.resolution);

        if (j.contains("start")) {
            const auto s = j.at("start").get<std::string>();
            if (s.size() != 1) throw ScenarioError("start must be a single label");
            sc.start_label = s[0];
        }
        if (j.contains("waypoints")) {
            const json& w = j.at("waypoints");
            if (w.is_string()) {
                for (char c : w.get<std::string>()) sc.waypoints.push_back(c);
            } else {
                for (const auto& s : w.get<std::vector<std::string>>()) {
                    if (s.size() != 1) throw ScenarioError("waypoint labels are single letters");
                    sc.waypoints.push_back(s[0]);
                }
            }
        }
        if (j.contains("variant")) {
            const auto v = parse_variant(j.at("variant").get<std::string>());
            if (!v) throw ScenarioError("unknown variant " + j.at("variant").dump());
            sc.variant = *v;
        }
        read(j, "seed", sc.seed);
        read(j, "tick_rate", sc.tick_rate);
        read(j, "timeout", sc.timeout);
        read(j, "waypoint_radius", sc.waypoint_radius);
        read(j, "teleop_hold", sc.teleop_hold);
        read(j, "belief_decay", sc.belief_decay);
        read(j, "phantom_rate", sc.phantom_rate);
        read(j, "head_turn_yaw", sc.head_turn_yaw);
        read(j, "item_period", sc.item_period);

        bool wants_overlap = false;
        if (j.contains("noise")) {
            const json& n = j.at("noise");
            if (n.is_string() && n.get<std::string>() == "random-overlap") {
                wants_overlap = true;
            } else if (n.is_null()) {
                sc.noise = world::NoiseSchedule{};
            } else {
                check_keys(n, "noise", {"start", "end", "phantom_rate"});
                world::NoiseSchedule ns{n.at("start").get<double>(), n.at("end").get<double>(),
                                        sc.phantom_rate};
                read(n, "phantom_rate", ns.phantom_rate);
                sc.noise = ns;
            }
        } else {
            sc.noise = world::NoiseSchedule{};
        }
        if (j.contains("distraction")) {
            const json& d = j.at("distraction");
            if (d.is_string() && d.get<std::string>() == "random-overlap") {
                wants_overlap = true;
            } else if (d.is_null()) {
                sc.distraction = op::DistractionSchedule{0.0, 0.0, sc.head_turn_yaw, sc.item_period};
            } else {
                check_keys(d, "distraction", {"start", "end", "head_turn_yaw", "item_period"});
                op::DistractionSchedule ds{d.at("start").get<double>(), d.at("end").get<double>(),
                                           sc.head_turn_yaw, sc.item_period};
                read(d, "head_turn_yaw", ds.head_turn_yaw);
                read(d, "item_period", ds.item_period);
                sc.distraction = ds;
            }
        } else {
            sc.distraction = op::DistractionSchedule{0.0, 0.0, sc.head_turn_yaw, sc.item_period};
        }
        if (j.contains("random_overlap") || wants_overlap) {
            OverlapDirective o;
            if (j.contains("random_overlap")) {
                const json& r = j.at("random_overlap");
                check_keys(r, "random_overlap",
                           {"noise_length", "distraction_length", "noise_start_min",
                            "noise_start_max"});
                read(r, "noise_length", o.noise_length);
                read(r, "distraction_length", o.distraction_length);
                read(r, "noise_start_min", o.noise_start_min);
                read(r, "noise_start_max", o.noise_start_max);
            }
            sc.random_overlap = o;
        }

        if (j.contains("laser")) {
            const json& l = j.at("laser");
            check_keys(l, "laser", {"beams", "max_range"});
            read(l, "beams", sc.laser.beams);
            read(l, "max_range", sc.laser.max_range);
        }
        if (j.contains("operator")) {
            const json& o = j.at("operator");
            check_keys(o, "operator",
                       {"teleop_skill", "steering_noise", "reaction_delay", "manual_switch_patience"});
            read(o, "teleop_skill", sc.operator_profile.teleop_skill);
            read(o, "steering_noise", sc.operator_profile.steering_noise);
            read(o, "reaction_delay", sc.operator_profile.reaction_delay);
            read(o, "manual_switch_patience", sc.operator_profile.manual_switch_patience);
        }
        if (j.contains("controller")) {
            const json& c = j.at("controller");
            check_keys(c, "controller",
                       {"error_low", "error_high", "speed_low", "speed_high", "window", "cooldown",
                        "activation_threshold", "rules"});
            auto& m = sc.controller.membership;
            read(c, "error_low", m.error_low);
            read(c, "error_high", m.error_high);
            read(c, "speed_low", m.speed_low);
            read(c, "speed_high", m.speed_high);
            read(c, "window", sc.controller.window_length);
            read(c, "cooldown", sc.controller.cooldown);
            read(c, "activation_threshold", sc.controller.activation_threshold);
            if (c.contains("rules")) {
                const json& r = c.at("rules");
                if (r.is_string()) {
                    std::filesystem::path p = r.get<std::string>();
                    if (p.is_relative()) p = base_dir / p;
                    sc.rules = mi::load_rule_base(p.string());
                } else {
                    sc.rules = mi::RuleBase::from_json(r);
                }
            }
        }
        if (j.contains("attention")) {
            const json& a = j.at("attention");
            check_keys(a, "attention", {"alpha", "attend_band", "away_band", "dropout_grace"});
            read(a, "alpha", sc.attention.alpha);
            read(a, "attend_band", sc.attention.calibration.attend_band);
            read(a, "away_band", sc.attention.calibration.away_band);
            read(a, "dropout_grace", sc.attention.dropout_grace);
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed scenario: ") + e.what());
    } catch (const world::MapFormatError& e) {
        throw ScenarioError(std::string("bad map: ") + e.what());
    } catch (const mi::RuleBaseError& e) {
        throw ScenarioError(std::string("bad rule base: ") + e.what());
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ScenarioError(path.string() + ": " + e.what());
    }
    return parse_scenario(j, path.parent_path());
}

json to_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["map_rows"] = sc.map_rows;
    j["resolution"] = sc.resolution;
    j["start"] = std::string(1, sc.start_label);
    j["waypoints"] = std::string(sc.waypoints.begin(), sc.waypoints.end());
    j["variant"] = std::string(to_string(sc.variant));
    j["seed"] = sc.seed;
    j["tick_rate"] = sc.tick_rate;
    j["timeout"] = sc.timeout;
    j["waypoint_radius"] = sc.waypoint_radius;
    j["teleop_hold"] = sc.teleop_hold;
    j["belief_decay"] = sc.belief_decay;
    j["phantom_rate"] = sc.phantom_rate;
    j["head_turn_yaw"] = sc.head_turn_yaw;
    j["item_period"] = sc.item_period;
    if (sc.noise) {
        j["noise"] = {{"start", sc.noise->start}, {"end", sc.noise->end},
                      {"phantom_rate", sc.noise->phantom_rate}};
    } else {
        j["noise"] = "random-overlap";
    }
    if (sc.distraction) {
        j["distraction"] = {{"start", sc.distraction->start},
                            {"end", sc.distraction->end},
                            {"head_turn_yaw", sc.distraction->head_turn_yaw},
                            {"item_period", sc.distraction->item_period}};
    } else {
        j["distraction"] = "random-overlap";
    }
    if (sc.random_overlap) {
        const auto& o = *sc.random_overlap;
        j["random_overlap"] = {{"noise_length", o.noise_length},
                               {"distraction_length", o.distraction_length},
                               {"noise_start_min", o.noise_start_min},
                               {"noise_start_max", o.noise_start_max}};
    }
    j["laser"] = {{"beams", sc.laser.beams}, {"max_range", sc.laser.max_range}};
    const auto& p = sc.operator_profile;
    j["operator"] = {{"teleop_skill", p.teleop_skill},
                     {"steering_noise", p.steering_noise},
                     {"reaction_delay", p.reaction_delay},
                     {"manual_switch_patience", p.manual_switch_patience}};
    const auto& c = sc.controller;
    j["controller"] = {{"error_low", c.membership.error_low},
                       {"error_high", c.membership.error_high},
                       {"speed_low", c.membership.speed_low},
                       {"speed_high", c.membership.speed_high},
                       {"window", c.window_length},
                       {"cooldown", c.cooldown},
                       {"activation_threshold", c.activation_threshold}};
    if (sc.rules) j["controller"]["rules"] = sc.rules->to_json();
    j["attention"] = {{"alpha", sc.attention.alpha},
                      {"attend_band", sc.attention.calibration.attend_band},
                      {"away_band", sc.attention.calibration.away_band},
                      {"dropout_grace", sc.attention.dropout_grace}};
    return j;
}

}  // namespace caami::harness
