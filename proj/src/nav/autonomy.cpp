#include "caami/nav/autonomy.hpp"

#include <limits>

namespace caami::nav {

namespace {

// Re-plan when the robot has drifted this far from its path (e.g. after a
// stretch of teleoperation).
constexpr double max_path_deviation = 1.0;
// Ticks to wait before retrying after a failed plan.
constexpr int no_path_retry_ticks = 5;

std::size_t nearest_index(const OccupancyGrid& grid, const Path& path, Point p, double& dist) {
    std::size_t best = 0;
    dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
        const double d = world::distance(grid.center_of(path.waypoints[i]), p);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    return best;
}

std::optional<Path> plan_from_robot(const OccupancyGrid& belief, const RobotState& state,
                                    CellIndex goal) {
    const CellIndex start = robot_cell(belief, state.position());
    if (belief.occupied(start) && belief.in_bounds(start)) {
        OccupancyGrid copy = belief;
        copy.set(start, world::Cell::Free);
        return plan(copy, start, goal);
    }
    return plan(belief, start, goal);
}

}  // namespace

std::optional<Path> replan_if_blocked(const OccupancyGrid& belief, const Path& path,
                                      const RobotState& state) {
    if (path.empty()) {
        return std::nullopt;
    }
    double dist = 0.0;
    const std::size_t k = nearest_index(belief, path, state.position(), dist);
    const CellIndex own = robot_cell(belief, state.position());
    double ahead = 0.0;
    bool blocked = false;
    for (std::size_t i = k; i < path.waypoints.size(); ++i) {
        if (i > k) {
            ahead += world::distance(belief.center_of(path.waypoints[i - 1]),
                                     belief.center_of(path.waypoints[i]));
        }
        if (ahead > blocked_lookahead) {
            break;
        }
        if (path.waypoints[i] != own && belief.occupied(path.waypoints[i])) {
            blocked = true;
            break;
        }
    }
    if (!blocked) {
        return path;
    }
    return plan_from_robot(belief, state, path.goal());
}

AutonomousNavigator::AutonomousNavigator(FollowerParams params) : params_(params) {}

void AutonomousNavigator::set_goal(std::optional<CellIndex> goal) {
    goal_ = goal;
    path_.reset();
    retry_countdown_ = 0;
}

FollowResult AutonomousNavigator::update(const OccupancyGrid& belief, const RobotState& state) {
    if (!goal_) {
        return {};
    }
    if (path_) {
        double dist = 0.0;
        nearest_index(belief, *path_, state.position(), dist);
        if (dist > max_path_deviation) {
            path_.reset();
        } else {
            path_ = replan_if_blocked(belief, *path_, state);
            if (!path_) {
                retry_countdown_ = no_path_retry_ticks;
            }
        }
    }
    if (!path_) {
        if (retry_countdown_ > 0) {
            --retry_countdown_;
            return {};
        }
        path_ = plan_from_robot(belief, state, *goal_);
        if (!path_) {
            retry_countdown_ = no_path_retry_ticks;
            return {};
        }
    }
    return follow(belief, *path_, state, params_);
}

}  // namespace caami::nav
