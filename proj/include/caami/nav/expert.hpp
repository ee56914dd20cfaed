#pragma once

#include <optional>
#include <stdexcept>

#include "caami/nav/follower.hpp"
#include "caami/nav/free_space.hpp"

namespace caami::nav {

struct ExpertProfile {
    double expected_speed = 0.0;           // m/s the expert would command now
    double remaining_expert_length = 0.0;  // m, shortest free-space distance to the goal
};

class UnreachableGoal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Navigation expert with an idealized view of the world: the true map,
/// no noise. Re-plans from the robot's actual pose every evaluation, so the
/// expected speed reflects what is achievable from where the robot is now.
class Expert {
public:
    explicit Expert(OccupancyGrid ideal, FollowerParams params = {});

    /// Throws UnreachableGoal if the goal cannot be reached on the ideal map.
    ExpertProfile evaluate(const RobotState& state, std::optional<CellIndex> goal);

    const OccupancyGrid& ideal() const { return free_space_.grid(); }
    const FreeSpaceDistance& free_space() const { return free_space_; }

private:
    FollowerParams params_;
    FreeSpaceDistance free_space_;
    std::optional<std::pair<CellIndex, CellIndex>> cached_key_;
    Path cached_path_;
};

ExpertProfile expert_expected_speed(const OccupancyGrid& ideal, const RobotState& state,
                                    std::optional<CellIndex> goal,
                                    const FollowerParams& params = {});

}  // namespace caami::nav
