#pragma once

#include "caami/world/grid.hpp"
#include "caami/world/types.hpp"

namespace caami::world {

VelocityCommand clamp_command(const VelocityCommand& cmd, const KinematicLimits& limits);

/// Differential-drive update: heading first, then translation along the new
/// heading. Motion whose straight segment would enter an Occupied cell is
/// blocked: position held, linear speed zeroed and the collided flag set.
RobotState step(const OccupancyGrid& grid, const RobotState& state, const VelocityCommand& cmd,
                double dt, const KinematicLimits& limits = {});

}  // namespace caami::world
