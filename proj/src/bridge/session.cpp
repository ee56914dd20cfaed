#include "caami/bridge/session.hpp"

#include <stdexcept>

namespace caami::bridge {

using harness::Command;
using nlohmann::json;

namespace {

json cell_json(world::CellIndex c) { return json::array({c.x, c.y}); }

std::vector<std::string> belief_rows(const world::OccupancyGrid& g) {
    std::vector<std::string> rows;
    for (int y = g.height() - 1; y >= 0; --y) {
        std::string row(static_cast<std::size_t>(g.width()), '.');
        for (int x = 0; x < g.width(); ++x) {
            if (g.occupied({x, y})) row[static_cast<std::size_t>(x)] = '#';
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json to_json(const TelemetrySnapshot& s) {
    json path = json::array();
    for (const auto& c : s.path) path.push_back(cell_json(c));
    json delta = json::array();
    for (const auto& c : s.belief_delta) {
        delta.push_back({c.cell.x, c.cell.y, c.value == world::Cell::Occupied ? 1 : 0});
    }
    json last = nullptr;
    if (s.last_switch) {
        last = {{"t", s.last_switch->t},
                {"initiator", std::string(mi::to_string(s.last_switch->initiator))},
                {"from", std::string(world::to_string(s.last_switch->from))},
                {"to", std::string(world::to_string(s.last_switch->to))}};
    }
    return {{"type", "telemetry"},
            {"tick", s.tick},
            {"t", s.t},
            {"pose", {{"x", s.robot.x}, {"y", s.robot.y}, {"heading", s.robot.heading}}},
            {"v", s.robot.linear_speed},
            {"w", s.robot.angular_speed},
            {"collided", s.robot.collided},
            {"loa", std::string(world::to_string(s.loa))},
            {"goal", s.goal ? cell_json(*s.goal) : json(nullptr)},
            {"path", path},
            {"belief_delta", delta},
            {"availability",
             {{"degree", s.availability.attending_degree},
              {"attending", s.availability.attending},
              {"filtered_yaw", s.availability.filtered_yaw}}},
            {"mean_error", s.mean_error},
            {"last_switch", last},
            {"waypoints_remaining", std::string(s.waypoints_remaining.begin(),
                                                s.waypoints_remaining.end())},
            {"status", std::string(harness::to_string(s.status))},
            {"paused", s.paused}};
}

LiveSession::LiveSession(harness::Scenario scenario, harness::Variant variant, std::uint64_t seed,
                         std::filesystem::path base_dir)
    : base_dir_(std::move(base_dir)) {
    start(std::move(scenario), variant, seed);
}

void LiveSession::start(harness::Scenario scenario, harness::Variant variant,
                        std::uint64_t seed) {
    scenario.attention.dropout_grace = live_dropout_grace;
    auto log = std::make_unique<std::ostringstream>();
    std::ostringstream* sink = log.get();
    auto engine = std::make_unique<harness::TrialEngine>(
        scenario, variant, seed, [sink](const json& j) { *sink << j.dump() << '\n'; });
    if (engine_) finished_logs_.push_back(log_->str());
    log_ = std::move(log);
    engine_ = std::move(engine);
    paused_ = false;
    delta_.clear();
    last_switch_.reset();
    mean_error_ = 0.0;
    ++generation_;
}

json LiveSession::reply_error(const json& msg, const std::string& reason) const {
    json r = {{"type", "error"}, {"reason", reason}};
    if (msg.is_object() && msg.contains("id")) r["id"] = msg["id"];
    return r;
}

json LiveSession::handle_text(const std::string& line) {
    json msg;
    try {
        msg = json::parse(line);
    } catch (const json::exception& e) {
        return reply_error(nullptr, std::string("malformed JSON: ") + e.what());
    }
    return handle(msg);
}

json LiveSession::handle(const json& msg) {
    if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
        return reply_error(msg, "message must be an object with a string 'type'");
    }
    const std::string type = msg["type"].get<std::string>();
    json ack = {{"type", "ack"}, {"command", type}};
    if (msg.contains("id")) ack["id"] = msg["id"];

    std::lock_guard lock(mu_);
    if (type == "pause" || type == "resume") {
        paused_ = type == "pause";
        ack["tick"] = engine_->tick();
        return ack;
    }
    if (type == "reset") {
        try {
            harness::Scenario sc = engine_->scenario();
            if (msg.contains("scenario")) {
                const json& s = msg["scenario"];
                sc = s.is_string() ? harness::load_scenario(base_dir_ / s.get<std::string>())
                                   : harness::parse_scenario(s, base_dir_);
            }
            harness::Variant v = engine_->variant();
            if (msg.contains("variant")) {
                const auto parsed = harness::parse_variant(msg["variant"].get<std::string>());
                if (!parsed) return reply_error(msg, "unknown variant " + msg["variant"].dump());
                v = *parsed;
            }
            const std::uint64_t seed =
                msg.contains("seed") ? msg["seed"].get<std::uint64_t>() : engine_->seed();
            start(std::move(sc), v, seed);
        } catch (const std::exception& e) {
            return reply_error(msg, std::string("reset failed: ") + e.what());
        }
        ack["tick"] = 0;
        ack["generation"] = generation_;
        return ack;
    }

    Command cmd;
    try {
        cmd = harness::command_from_json(msg);
    } catch (const std::exception& e) {
        return reply_error(msg, e.what());
    }
    if (engine_->finished()) return reply_error(msg, "trial has finished; send reset");
    const harness::CommandResult r = engine_->validate(cmd);
    if (!r.ok) return reply_error(msg, r.reason);
    engine_->queue(std::move(cmd));
    ack["tick"] = engine_->tick() + 1;  // applied at the start of this tick
    ack["ignored"] = r.ignored;
    ack["clamped"] = r.clamped;
    if (!r.reason.empty()) ack["reason"] = r.reason;
    return ack;
}

void LiveSession::absorb(const harness::TickRecord& rec) {
    for (const auto& c : rec.belief_changes) delta_[{c.cell.y, c.cell.x}] = c.value;
    mean_error_ = rec.decision.mean_error;
}

bool LiveSession::tick() {
    std::lock_guard lock(mu_);
    if (paused_ || engine_->finished()) return false;
    const std::size_t before = engine_->metrics().switches.size();
    absorb(engine_->step());
    const auto switches = engine_->metrics().switches;
    if (switches.size() > before) {
        const auto& s = switches.back().change;
        last_switch_ = LastSwitch{s.t, s.initiator, s.from, s.to};
    }
    return true;
}

TelemetrySnapshot LiveSession::snapshot() {
    std::lock_guard lock(mu_);
    TelemetrySnapshot s;
    s.tick = engine_->tick();
    s.t = engine_->time();
    s.robot = engine_->state();
    s.loa = engine_->controller().active_loa();
    s.goal = engine_->state().current_goal;
    if (s.goal && engine_->navigator().path()) s.path = engine_->navigator().path()->waypoints;
    for (const auto& [yx, value] : delta_) s.belief_delta.push_back({{yx.second, yx.first}, value});
    delta_.clear();
    s.availability = engine_->availability();
    s.mean_error = mean_error_;
    s.last_switch = last_switch_;
    s.waypoints_remaining = engine_->remaining_waypoints();
    s.status = engine_->status();
    s.paused = paused_;
    return s;
}

json LiveSession::hello() {
    std::lock_guard lock(mu_);
    delta_.clear();
    const harness::Scenario& sc = engine_->scenario();
    const world::OccupancyGrid& g = engine_->belief().grid();
    json waypoints = json::object();
    for (char w : sc.waypoints) waypoints[std::string(1, w)] = cell_json(sc.waypoint_cell(w));
    return {{"type", "hello"},
            {"version", protocol_version},
            {"generation", generation_},
            {"scenario", sc.name},
            {"variant", std::string(harness::to_string(engine_->variant()))},
            {"seed", engine_->seed()},
            {"tick_rate", sc.tick_rate},
            {"tick", engine_->tick()},
            {"width", g.width()},
            {"height", g.height()},
            {"resolution", g.resolution()},
            {"map", belief_rows(g)},
            {"start", cell_json(sc.start_cell())},
            {"waypoints", waypoints},
            {"waypoint_order", std::string(sc.waypoints.begin(), sc.waypoints.end())},
            {"limits", {{"v_max", world::KinematicLimits{}.max_linear},
                        {"w_max", world::KinematicLimits{}.max_angular}}}};
}

bool LiveSession::paused() const {
    std::lock_guard lock(mu_);
    return paused_;
}

bool LiveSession::finished() const {
    std::lock_guard lock(mu_);
    return engine_->finished();
}

int LiveSession::ticks() const {
    std::lock_guard lock(mu_);
    return engine_->tick();
}

double LiveSession::dt() const {
    std::lock_guard lock(mu_);
    return engine_->dt();
}

int LiveSession::generation() const {
    std::lock_guard lock(mu_);
    return generation_;
}

std::string LiveSession::decision_log() const {
    std::lock_guard lock(mu_);
    return log_->str();
}

std::vector<std::string> LiveSession::finished_logs() const {
    std::lock_guard lock(mu_);
    return finished_logs_;
}

}  // namespace caami::bridge
