#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "caami/harness/scenario.hpp"
#include "caami/nav/autonomy.hpp"
#include "caami/nav/expert.hpp"
#include "caami/world/belief.hpp"

namespace caami::harness {

using world::CellIndex;
using world::LoaMode;

struct TeleopCommand {
    world::VelocityCommand velocity;
};
struct SetGoalCommand {
    CellIndex cell;
};
struct RequestLoaCommand {
    LoaMode mode;
};
struct YawSampleCommand {
    double yaw;  // deg
};

using Command = std::variant<TeleopCommand, SetGoalCommand, RequestLoaCommand, YawSampleCommand>;

nlohmann::json command_to_json(const Command& c);
/// Throws std::invalid_argument on a malformed command object.
Command command_from_json(const nlohmann::json& j);

struct CommandResult {
    bool ok = true;
    bool ignored = false;  // accepted but had no effect (e.g. teleop in Autonomy)
    bool clamped = false;  // velocity reduced to the kinematic limits
    std::string reason;
};

enum class TrialStatus { Running, Completed, TimedOut };
std::string_view to_string(TrialStatus s);

struct SwitchEvent {
    mi::LoaSwitch change;
    bool attending = true;  // operator availability at that tick
};

/// One goal assignment, closed when its waypoint is reached or the goal changes.
struct LegRecord {
    char waypoint = '?';
    CellIndex goal;
    double t_start = 0.0;
    double t_end = 0.0;
    double expert_length = 0.0;  // shortest free-space distance minus the arrival radius
    double odometry = 0.0;       // distance actually driven
    bool completed = false;
};

struct RunMetrics {
    TrialStatus status = TrialStatus::Running;
    double completion_time = 0.0;
    int ticks = 0;
    int teleop_ticks = 0;
    int autonomy_ticks = 0;
    double time_in_teleop = 0.0;
    double time_in_autonomy = 0.0;
    int switches_total = 0;
    int switches_ai = 0;
    int switches_human = 0;
    /// AI switches from Autonomy to Teleoperation while the operator was not attending.
    int ai_interruptions_unattended = 0;
    int collisions = 0;
    int waypoints_reached = 0;
    op::SecondaryScore secondary;
    std::vector<LegRecord> legs;
    std::vector<SwitchEvent> switches;
};

/// Everything that happened on one tick.
struct TickRecord {
    int tick = 0;
    double t = 0.0;
    world::RobotState state;  // after the step
    LoaMode loa_during_step = LoaMode::Autonomy;
    std::optional<double> yaw;
    attention::AvailabilityEstimate availability;
    double expert_speed = 0.0;
    mi::DecisionRecord decision;
    std::optional<char> reached;
    std::vector<world::CellChange> belief_changes;
};

/// Deterministic simulation of one trial. Commands queued between ticks are
/// applied in arrival order at the start of the next tick. Both the headless
/// runner and the live bridge drive trials through this class.
class TrialEngine {
public:
    using LogSink = std::function<void(const nlohmann::json&)>;

    TrialEngine(const Scenario& scenario, Variant variant, std::uint64_t seed,
                LogSink log = nullptr);

    /// Checks a command against the current state without applying it.
    CommandResult validate(const Command& c) const;
    void queue(Command c) { queue_.push_back(std::move(c)); }

    TickRecord step();

    bool finished() const { return status_ != TrialStatus::Running; }
    TrialStatus status() const { return status_; }
    int tick() const { return tick_; }
    double time() const { return tick_ * dt_; }
    double dt() const { return dt_; }

    const Scenario& scenario() const { return scenario_; }
    Variant variant() const { return variant_; }
    std::uint64_t seed() const { return seed_; }
    const Degradation& degradation() const { return degradation_; }
    const world::RobotState& state() const { return state_; }
    const world::BeliefMap& belief() const { return belief_; }
    const world::OccupancyGrid& true_grid() const { return scenario_.arena.grid; }
    const mi::MixedInitiativeController& controller() const { return controller_; }
    const nav::AutonomousNavigator& navigator() const { return navigator_; }
    const attention::AvailabilityEstimate& availability() const { return tracker_.estimate(); }
    std::optional<CellIndex> next_waypoint() const;
    std::vector<char> remaining_waypoints() const;
    const std::optional<TickRecord>& last_tick() const { return last_tick_; }

    /// Metrics so far; final once finished().
    RunMetrics metrics() const;

private:
    CommandResult apply(const Command& c);
    void set_goal(std::optional<CellIndex> goal);
    void record_switch(const mi::LoaSwitch& s, bool attending);
    void close_leg(bool completed);
    void emit(const nlohmann::json& j) const;
    void finish(TrialStatus s);
    void emit_end() const;

    Scenario scenario_;
    Variant variant_;
    std::uint64_t seed_;
    double dt_;
    Degradation degradation_;
    LogSink log_;

    world::RobotState state_;
    world::BeliefMap belief_;
    Rng noise_rng_;
    nav::AutonomousNavigator navigator_;
    nav::Expert expert_;
    mi::MixedInitiativeController controller_;
    attention::AvailabilityTracker tracker_;

    std::deque<Command> queue_;
    std::optional<world::VelocityCommand> held_teleop_;
    double held_since_ = 0.0;
    std::optional<double> pending_yaw_;

    int tick_ = 0;
    std::size_t next_index_ = 0;
    TrialStatus status_ = TrialStatus::Running;
    RunMetrics metrics_;
    std::optional<LegRecord> leg_;
    bool was_colliding_ = false;
    std::optional<TickRecord> last_tick_;
};

}  // namespace caami::harness
