#pragma once

#include <compare>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>

namespace caami::world {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct CellIndex {
    int x = 0;
    int y = 0;

    friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

enum class LoaMode : std::uint8_t { Teleoperation, Autonomy };

constexpr LoaMode other(LoaMode mode) {
    return mode == LoaMode::Teleoperation ? LoaMode::Autonomy : LoaMode::Teleoperation;
}

std::string_view to_string(LoaMode mode);
std::optional<LoaMode> parse_loa(std::string_view text);

struct VelocityCommand {
    double linear = 0.0;   // m/s
    double angular = 0.0;  // rad/s

    friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

struct KinematicLimits {
    double max_linear = 1.0;
    double max_angular = std::numbers::pi;
};

struct RobotState {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // (-pi, pi]
    double linear_speed = 0.0;
    double angular_speed = 0.0;
    LoaMode active_loa = LoaMode::Autonomy;
    std::optional<CellIndex> current_goal;
    bool collided = false;  // set when the last step was blocked

    Point position() const { return {x, y}; }

    friend bool operator==(const RobotState&, const RobotState&) = default;
};

/// Wraps an angle into (-pi, pi].
double wrap_angle(double radians);

double distance(Point a, Point b);

}  // namespace caami::world
