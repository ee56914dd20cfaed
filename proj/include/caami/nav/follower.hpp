#pragma once

#include "caami/nav/planner.hpp"
#include "caami/world/types.hpp"

namespace caami::nav {

using world::Point;
using world::RobotState;
using world::VelocityCommand;

struct FollowerParams {
    double lookahead = 0.75;       // m
    double decel_radius = 1.5;     // m
    double goal_tolerance = 0.25;  // m
    double turn_gain = 2.0;        // rad/s per rad of heading error
    world::KinematicLimits limits;
    /// Pull the lookahead point back until the straight line to it is clear.
    bool line_of_sight = false;
};

struct FollowResult {
    VelocityCommand command;
    bool goal_reached = false;
    double remaining = 0.0;  // m, along the path from the robot
};

/// Pure-pursuit style follower. Linear speed is v_max scaled by
/// max(0, cos(heading error)) and by a linear ramp inside decel_radius.
FollowResult follow(const OccupancyGrid& grid, const Path& path, const RobotState& state,
                    const FollowerParams& params = {});

/// Cell to plan from for a robot at p. A robot sitting exactly on a cell
/// boundary may floor into an occupied neighbour; prefer a Free cell that
/// still contains p.
CellIndex robot_cell(const OccupancyGrid& grid, Point p);

}  // namespace caami::nav
