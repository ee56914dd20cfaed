#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "caami/attention/attention.hpp"
#include "caami/nav/follower.hpp"
#include "caami/world/random.hpp"

namespace caami::op {

using world::CellIndex;
using world::LoaMode;
using world::OccupancyGrid;
using world::RobotState;
using world::VelocityCommand;

struct OperatorProfile {
    double teleop_skill = 0.85;            // fraction of v_max the operator drives at
    double steering_noise = 0.1;           // rad, sd of heading-correction noise
    double reaction_delay = 0.4;           // s before a discrete action lands
    double manual_switch_patience = 4.0;   // s of stall before asking for the other LOA

    void validate() const;
};

struct DistractionSchedule {
    double start = 0.0;
    double end = 0.0;
    double head_turn_yaw = 60.0;  // deg
    double item_period = 3.0;     // s per secondary-task item

    bool active(double t) const { return t >= start && t < end; }
    void validate() const;
};

struct SecondaryScore {
    int items_presented = 0;
    int items_completed = 0;
    int interruptions = 0;

    friend bool operator==(const SecondaryScore&, const SecondaryScore&) = default;
};

/// What the operator can see on the console.
struct Observation {
    double t = 0.0;
    RobotState robot;
    std::optional<CellIndex> next_waypoint;  // none when the route is done
};

struct OperatorAction {
    std::optional<VelocityCommand> teleop;
    std::optional<CellIndex> goal_click;
    std::optional<LoaMode> request_loa;

    bool empty() const { return !teleop && !goal_click && !request_loa; }
};

inline constexpr double head_turn_time = 0.3;  // s
inline constexpr double head_jitter_sd = 2.0;  // deg
inline constexpr double stall_distance = 0.2;  // m

/// Noise-free head yaw for the schedule: linear turns of head_turn_time
/// starting at each interval boundary.
double yaw_profile(const DistractionSchedule& schedule, double t);

/// yaw_profile plus N(0, head_jitter_sd) jitter, clamped to [-90, 90].
attention::HeadPoseSample yaw_trace(const DistractionSchedule& schedule, double t, Rng& rng);

/// Items run back to back from the interval start. A switch to Teleoperation
/// inside the interval counts as an interruption and voids the item in progress.
SecondaryScore score_secondary(const DistractionSchedule& schedule,
                               const std::vector<std::pair<double, LoaMode>>& switches);

/// Scripted operator. Sees the true map, so teleoperation is not fooled by
/// sensor noise. Deterministic for a given profile, seed and observation history.
class ScriptedOperator {
public:
    ScriptedOperator(OperatorProfile profile, DistractionSchedule schedule, OccupancyGrid map,
                     std::uint64_t seed);

    OperatorAction act(const Observation& obs);

    const OperatorProfile& profile() const { return profile_; }
    const DistractionSchedule& schedule() const { return schedule_; }

    /// Follower settings used when the operator drives.
    nav::FollowerParams drive_params() const;

private:
    struct Pending {
        double due;
        OperatorAction action;
    };

    VelocityCommand drive(const Observation& obs);
    bool stalled(const Observation& obs);
    void schedule_action(double t, OperatorAction a);

    OperatorProfile profile_;
    DistractionSchedule schedule_;
    OccupancyGrid map_;
    Rng steering_rng_;
    std::deque<Pending> pending_;
    std::deque<std::pair<double, world::Point>> history_;
    std::optional<LoaMode> last_loa_;
    std::optional<CellIndex> clicked_;
    std::optional<LoaMode> requested_;
    std::optional<nav::Path> drive_path_;
};

}  // namespace caami::op
