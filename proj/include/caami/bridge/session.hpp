#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "caami/harness/engine.hpp"

namespace caami::bridge {

inline constexpr int protocol_version = 1;

/// Availability falls back to the dropout rule after this long without a yaw sample.
inline constexpr double live_dropout_grace = 1.0;  // s

struct LastSwitch {
    double t = 0.0;
    mi::Initiator initiator = mi::Initiator::Ai;
    world::LoaMode from = world::LoaMode::Autonomy;
    world::LoaMode to = world::LoaMode::Teleoperation;
};

/// Value copy of the live session state, sent to the console.
struct TelemetrySnapshot {
    int tick = 0;
    double t = 0.0;
    world::RobotState robot;
    world::LoaMode loa = world::LoaMode::Autonomy;
    std::optional<world::CellIndex> goal;
    std::vector<world::CellIndex> path;
    std::vector<world::CellChange> belief_delta;  // since the previous snapshot
    attention::AvailabilityEstimate availability;
    double mean_error = 0.0;
    std::optional<LastSwitch> last_switch;
    std::vector<char> waypoints_remaining;
    harness::TrialStatus status = harness::TrialStatus::Running;
    bool paused = false;
};

nlohmann::json to_json(const TelemetrySnapshot& s);

/// One live trial driven by a human through protocol messages. Thread-safe:
/// handle() is called from the network context, tick() from the clock, and
/// both only meet at the engine's command queue under the session lock.
class LiveSession {
public:
    LiveSession(harness::Scenario scenario, harness::Variant variant, std::uint64_t seed,
                std::filesystem::path base_dir = {});

    /// Handles one client message and returns the reply ("ack" or "error").
    /// Commands are validated on arrival and applied at the next tick.
    nlohmann::json handle(const nlohmann::json& msg);
    /// Parses one line first; malformed text yields an "error" reply.
    nlohmann::json handle_text(const std::string& line);

    /// Advances one tick unless paused or finished. Returns whether time moved.
    bool tick();

    /// Snapshot with the belief changes accumulated since the previous call.
    TelemetrySnapshot snapshot();
    /// Handshake message with the full current belief map; restarts the delta stream.
    nlohmann::json hello();

    bool paused() const;
    bool finished() const;
    int ticks() const;
    double dt() const;
    /// Number of resets so far; the console re-syncs from hello() when it changes.
    int generation() const;

    /// Decision log of the current trial (JSON lines, headless-replayable).
    std::string decision_log() const;
    /// Logs of trials ended by a reset, oldest first.
    std::vector<std::string> finished_logs() const;

private:
    void start(harness::Scenario scenario, harness::Variant variant, std::uint64_t seed);
    void absorb(const harness::TickRecord& rec);
    nlohmann::json reply_error(const nlohmann::json& msg, const std::string& reason) const;

    mutable std::mutex mu_;
    std::filesystem::path base_dir_;
    std::unique_ptr<std::ostringstream> log_;
    std::unique_ptr<harness::TrialEngine> engine_;
    bool paused_ = false;
    int generation_ = 0;
    std::map<std::pair<int, int>, world::Cell> delta_;  // keyed by (y, x)
    std::optional<LastSwitch> last_switch_;
    double mean_error_ = 0.0;
    std::vector<std::string> finished_logs_;
};

}  // namespace caami::bridge
