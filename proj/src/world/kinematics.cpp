#include "caami/world/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace caami::world {

VelocityCommand clamp_command(const VelocityCommand& cmd, const KinematicLimits& limits) {
    return {std::clamp(cmd.linear, -limits.max_linear, limits.max_linear),
            std::clamp(cmd.angular, -limits.max_angular, limits.max_angular)};
}

RobotState step(const OccupancyGrid& grid, const RobotState& state, const VelocityCommand& cmd,
                double dt, const KinematicLimits& limits) {
    const VelocityCommand c = clamp_command(cmd, limits);
    RobotState next = state;
    next.heading = wrap_angle(state.heading + c.angular * dt);
    next.angular_speed = c.angular;
    next.linear_speed = c.linear;
    next.collided = false;
    if (c.linear == 0.0) {
        return next;
    }
    const Point target{state.x + c.linear * std::cos(next.heading) * dt,
                       state.y + c.linear * std::sin(next.heading) * dt};
    if (!segment_clear(grid, state.position(), target)) {
        next.linear_speed = 0.0;
        next.collided = true;
        return next;
    }
    next.x = target.x;
    next.y = target.y;
    return next;
}

}  // namespace caami::world
