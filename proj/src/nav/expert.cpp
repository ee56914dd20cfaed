#include "caami/nav/expert.hpp"

#include <algorithm>

namespace caami::nav {

Expert::Expert(OccupancyGrid ideal, FollowerParams params)
    : params_(params), free_space_(std::move(ideal)) {}

ExpertProfile Expert::evaluate(const RobotState& state, std::optional<CellIndex> goal) {
    if (!goal) {
        return {};
    }
    const OccupancyGrid& grid = ideal();
    const CellIndex start = robot_cell(grid, state.position());
    const std::pair key{start, *goal};
    if (!cached_key_ || *cached_key_ != key) {
        auto path = plan(grid, start, *goal);
        if (!path) {
            throw UnreachableGoal("goal is unreachable on the ideal map");
        }
        cached_path_ = std::move(*path);
        cached_key_ = key;
    }
    const FollowResult f = follow(grid, cached_path_, state, params_);
    ExpertProfile profile;
    if (f.goal_reached) {
        return profile;
    }
    profile.expected_speed = std::max(0.0, f.command.linear);
    profile.remaining_expert_length =
        free_space_.shortest(state.position(), grid.center_of(*goal));
    return profile;
}

ExpertProfile expert_expected_speed(const OccupancyGrid& ideal, const RobotState& state,
                                    std::optional<CellIndex> goal,
                                    const FollowerParams& params) {
    Expert expert(ideal, params);
    return expert.evaluate(state, goal);
}

}  // namespace caami::nav
