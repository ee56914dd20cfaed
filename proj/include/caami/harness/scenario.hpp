#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "caami/attention/attention.hpp"
#include "caami/mi/controller.hpp"
#include "caami/operator/operator.hpp"
#include "caami/world/laser.hpp"
#include "caami/world/map_io.hpp"

namespace caami::harness {

enum class Variant { Mi, CaaMi, TeleopOnly, AutonomyOnly };

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Places both degradations at random so that they overlap: the noise
/// interval starts uniformly in [noise_start_min, noise_start_max] and the
/// distraction interval sits uniformly inside it.
struct OverlapDirective {
    double noise_length = 60.0;
    double distraction_length = 30.0;
    double noise_start_min = 10.0;
    double noise_start_max = 40.0;
};

struct AttentionSettings {
    double alpha = attention::default_alpha;
    attention::YawCalibration calibration;
    double dropout_grace = 0.5;  // s
};

struct Scenario {
    std::string name = "scenario";
    std::vector<std::string> map_rows;  // arena text, kept for logs and replay
    double resolution = 0.25;
    world::ArenaMap arena;
    char start_label = 'S';
    std::vector<char> waypoints;

    Variant variant = Variant::CaaMi;
    std::uint64_t seed = 1;
    double tick_rate = 10.0;  // Hz
    double timeout = 600.0;   // s
    double waypoint_radius = 0.5;
    double teleop_hold = 0.3;  // s a teleop command stays in force
    double belief_decay = 2.0;

    double phantom_rate = 0.3;
    std::optional<world::NoiseSchedule> noise;              // fixed interval
    std::optional<op::DistractionSchedule> distraction;     // fixed interval
    std::optional<OverlapDirective> random_overlap;         // used when either is unset
    double head_turn_yaw = 60.0;
    double item_period = 3.0;

    world::LaserConfig laser;
    op::OperatorProfile operator_profile;
    mi::ControllerParams controller;
    std::optional<mi::RuleBase> rules;  // replaces the variant's built-in rule base
    AttentionSettings attention;

    double dt() const { return 1.0 / tick_rate; }
    world::CellIndex start_cell() const { return arena.waypoints.at(start_label); }
    world::CellIndex waypoint_cell(char label) const { return arena.waypoints.at(label); }

    /// Throws ScenarioError on any inconsistency, including waypoints that
    /// cannot be reached on the map.
    void validate() const;
};

struct Degradation {
    world::NoiseSchedule noise;
    op::DistractionSchedule distraction;
};

/// Fixed intervals from the scenario, random-overlap placement otherwise.
/// Depends only on the scenario and seed, so variants sharing a seed share it.
Degradation place_degradation(const Scenario& scenario, std::uint64_t seed);

/// Relative map paths resolve against base_dir.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Self-contained form (map rows inline) that parse_scenario reads back.
nlohmann::json to_json(const Scenario& scenario);

}  // namespace caami::harness
