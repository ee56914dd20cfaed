#pragma once

#include <optional>

#include "caami/nav/follower.hpp"

namespace caami::nav {

/// Distance ahead of the robot, along the path, that is checked against the
/// belief map.
inline constexpr double blocked_lookahead = 2.0;

/// Re-plans on the belief map when any path cell within blocked_lookahead of
/// the robot is Occupied; otherwise returns the path unchanged. The robot's
/// own cell is treated as Free for planning.
std::optional<Path> replan_if_blocked(const OccupancyGrid& belief, const Path& path,
                                      const RobotState& state);

/// Autonomy LOA: owns the goal and the current plan on the belief map.
class AutonomousNavigator {
public:
    explicit AutonomousNavigator(FollowerParams params = {});

    void set_goal(std::optional<CellIndex> goal);
    std::optional<CellIndex> goal() const { return goal_; }
    const std::optional<Path>& path() const { return path_; }
    bool no_path() const { return goal_.has_value() && !path_.has_value(); }

    /// Plans or re-plans as needed and returns the command for this tick.
    FollowResult update(const OccupancyGrid& belief, const RobotState& state);

private:
    FollowerParams params_;
    std::optional<CellIndex> goal_;
    std::optional<Path> path_;
    int retry_countdown_ = 0;
};

}  // namespace caami::nav
