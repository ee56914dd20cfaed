#include "caami/harness/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "caami/world/kinematics.hpp"

namespace caami::harness {

using nlohmann::json;

namespace {

constexpr double time_eps = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json cell_json(std::optional<CellIndex> c) {
    if (!c) return nullptr;
    return json::array({c->x, c->y});
}

mi::MixedInitiativeController make_controller(const Scenario& sc, Variant v) {
    const LoaMode initial = v == Variant::TeleopOnly ? LoaMode::Teleoperation : LoaMode::Autonomy;
    mi::ControllerParams params = sc.controller;
    params.ignore_availability = v != Variant::CaaMi;
    mi::RuleBase rules = sc.rules ? *sc.rules
                         : v == Variant::CaaMi ? mi::RuleBase::cognitive_availability_aware()
                                               : mi::RuleBase::mixed_initiative();
    mi::MixedInitiativeController c(std::move(rules), params, initial);
    c.set_ai_enabled(v == Variant::Mi || v == Variant::CaaMi);
    return c;
}

std::string action_name(const mi::SwitchDecision& d) {
    if (d.action == mi::Action::NoSwitch) return "no_switch";
    return "switch_to_" + std::string(world::to_string(*d.target));
}

}  // namespace

json command_to_json(const Command& c) {
    return std::visit(
        overloaded{
            [](const TeleopCommand& t) -> json {
                return {{"type", "teleop"}, {"v", t.velocity.linear}, {"w", t.velocity.angular}};
            },
            [](const SetGoalCommand& g) -> json {
                return {{"type", "set_goal"}, {"cell", json::array({g.cell.x, g.cell.y})}};
            },
            [](const RequestLoaCommand& r) -> json {
                return {{"type", "request_loa"}, {"mode", std::string(world::to_string(r.mode))}};
            },
            [](const YawSampleCommand& y) -> json {
                return {{"type", "yaw_sample"}, {"yaw", y.yaw}};
            },
        },
        c);
}

Command command_from_json(const json& j) {
    try {
        const auto type = j.at("type").get<std::string>();
        if (type == "teleop") {
            return TeleopCommand{{j.at("v").get<double>(), j.at("w").get<double>()}};
        }
        if (type == "set_goal") {
            const auto& cell = j.at("cell");
            if (!cell.is_array() || cell.size() != 2) {
                throw std::invalid_argument("cell must be [x, y]");
            }
            return SetGoalCommand{{cell[0].get<int>(), cell[1].get<int>()}};
        }
        if (type == "request_loa") {
            const auto mode = world::parse_loa(j.at("mode").get<std::string>());
            if (!mode) throw std::invalid_argument("unknown LOA " + j.at("mode").dump());
            return RequestLoaCommand{*mode};
        }
        if (type == "yaw_sample") {
            return YawSampleCommand{j.at("yaw").get<double>()};
        }
        throw std::invalid_argument("unknown command type '" + type + "'");
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed command: ") + e.what());
    }
}

std::string_view to_string(TrialStatus s) {
    switch (s) {
        case TrialStatus::Running: return "running";
        case TrialStatus::Completed: return "completed";
        case TrialStatus::TimedOut: return "timeout";
    }
    return "?";
}

TrialEngine::TrialEngine(const Scenario& scenario, Variant variant, std::uint64_t seed,
                         LogSink log)
    : scenario_(scenario),
      variant_(variant),
      seed_(seed),
      dt_(scenario.dt()),
      degradation_(place_degradation(scenario, seed)),
      log_(std::move(log)),
      belief_(scenario.arena.grid, scenario.belief_decay),
      noise_rng_(make_stream(seed, stream::sensor_noise)),
      expert_(scenario.arena.grid),
      controller_(make_controller(scenario, variant)),
      tracker_(scenario.attention.alpha, scenario.attention.calibration,
               scenario.attention.dropout_grace) {
    const world::Point start = true_grid().center_of(scenario_.start_cell());
    state_.x = start.x;
    state_.y = start.y;
    state_.active_loa = controller_.active_loa();
    if (log_) {
        json j = {{"type", "header"},
                  {"format", 1},
                  {"variant", std::string(to_string(variant_))},
                  {"seed", seed_},
                  {"dt", dt_},
                  {"noise",
                   {{"start", degradation_.noise.start},
                    {"end", degradation_.noise.end},
                    {"phantom_rate", degradation_.noise.phantom_rate}}},
                  {"distraction",
                   {{"start", degradation_.distraction.start},
                    {"end", degradation_.distraction.end},
                    {"head_turn_yaw", degradation_.distraction.head_turn_yaw},
                    {"item_period", degradation_.distraction.item_period}}},
                  {"rules", controller_.rules().to_json()},
                  {"scenario", to_json(scenario_)}};
        emit(j);
    }
}

void TrialEngine::emit(const json& j) const {
    if (log_) log_(j);
}

std::optional<CellIndex> TrialEngine::next_waypoint() const {
    if (next_index_ >= scenario_.waypoints.size()) return std::nullopt;
    return scenario_.waypoint_cell(scenario_.waypoints[next_index_]);
}

std::vector<char> TrialEngine::remaining_waypoints() const {
    return {scenario_.waypoints.begin() + static_cast<std::ptrdiff_t>(next_index_),
            scenario_.waypoints.end()};
}

CommandResult TrialEngine::validate(const Command& c) const {
    CommandResult r;
    std::visit(
        overloaded{
            [&](const TeleopCommand& t) {
                if (!std::isfinite(t.velocity.linear) || !std::isfinite(t.velocity.angular)) {
                    r = {false, false, false, "velocity must be finite"};
                    return;
                }
                r.clamped = world::clamp_command(t.velocity, {}) != t.velocity;
                r.ignored = state_.active_loa != LoaMode::Teleoperation;
                if (r.ignored) r.reason = "teleop ignored outside Teleoperation";
            },
            [&](const SetGoalCommand& g) {
                if (!belief_.grid().in_bounds(g.cell)) {
                    r = {false, false, false, "goal cell is outside the map"};
                } else if (belief_.grid().occupied(g.cell)) {
                    r = {false, false, false, "goal cell is occupied"};
                } else if (!std::isfinite(expert_.free_space().shortest(
                               state_.position(), true_grid().center_of(g.cell)))) {
                    r = {false, false, false, "goal cell is unreachable"};
                }
            },
            [&](const RequestLoaCommand& q) {
                if (variant_ == Variant::TeleopOnly || variant_ == Variant::AutonomyOnly) {
                    r = {false, false, false, "LOA is fixed for this variant"};
                } else if (q.mode == state_.active_loa) {
                    r.ignored = true;
                    r.reason = "already active";
                }
            },
            [&](const YawSampleCommand& y) {
                if (!(std::abs(y.yaw) <= attention::max_yaw)) {
                    r = {false, false, false, "yaw must be within [-90, 90]"};
                }
            },
        },
        c);
    return r;
}

void TrialEngine::set_goal(std::optional<CellIndex> goal) {
    if (leg_) close_leg(false);
    state_.current_goal = goal;
    navigator_.set_goal(goal);
    controller_.notify_goal_change();
    if (goal) {
        LegRecord leg;
        leg.goal = *goal;
        const auto next = next_waypoint();
        leg.waypoint = next && *next == *goal ? scenario_.waypoints[next_index_] : '?';
        leg.t_start = time();
        const double esp =
            expert_.free_space().shortest(state_.position(), true_grid().center_of(*goal));
        leg.expert_length = std::max(0.0, esp - scenario_.waypoint_radius);
        leg_ = leg;
    }
    emit({{"type", "goal"}, {"tick", tick_}, {"t", time()}, {"cell", cell_json(goal)}});
}

void TrialEngine::close_leg(bool completed) {
    leg_->t_end = time();
    leg_->completed = completed;
    emit({{"type", "leg"},
          {"waypoint", std::string(1, leg_->waypoint)},
          {"goal", cell_json(leg_->goal)},
          {"t_start", leg_->t_start},
          {"t_end", leg_->t_end},
          {"expert_length", leg_->expert_length},
          {"odometry", leg_->odometry},
          {"completed", completed}});
    metrics_.legs.push_back(*leg_);
    leg_.reset();
}

void TrialEngine::record_switch(const mi::LoaSwitch& s, bool attending) {
    state_.active_loa = s.to;
    held_teleop_.reset();
    ++metrics_.switches_total;
    if (s.initiator == mi::Initiator::Ai) {
        ++metrics_.switches_ai;
        if (!attending && s.from == LoaMode::Autonomy && s.to == LoaMode::Teleoperation) {
            ++metrics_.ai_interruptions_unattended;
        }
    } else {
        ++metrics_.switches_human;
    }
    metrics_.switches.push_back({s, attending});
    emit({{"type", "switch"},
          {"tick", tick_},
          {"t", s.t},
          {"from", std::string(world::to_string(s.from))},
          {"to", std::string(world::to_string(s.to))},
          {"initiator", std::string(mi::to_string(s.initiator))},
          {"rule", s.rule ? json(*s.rule) : json(nullptr)},
          {"attending", attending}});
}

CommandResult TrialEngine::apply(const Command& c) {
    CommandResult r = validate(c);
    if (r.ok && !r.ignored) {
        std::visit(overloaded{
                       [&](const TeleopCommand& t) {
                           held_teleop_ = world::clamp_command(t.velocity, {});
                           held_since_ = time();
                       },
                       [&](const SetGoalCommand& g) { set_goal(g.cell); },
                       [&](const RequestLoaCommand& q) {
                           if (auto s = controller_.apply_operator_switch(q.mode, time())) {
                               record_switch(*s, tracker_.estimate().attending);
                           }
                       },
                       [&](const YawSampleCommand& y) { pending_yaw_ = y.yaw; },
                   },
                   c);
    }
    if (log_) {
        json j = {{"type", "command"}, {"tick", tick_}, {"command", command_to_json(c)},
                  {"ok", r.ok}};
        if (r.ignored) j["ignored"] = true;
        if (r.clamped) j["clamped"] = true;
        if (!r.reason.empty()) j["reason"] = r.reason;
        emit(j);
    }
    return r;
}

void TrialEngine::finish(TrialStatus s) {
    status_ = s;
    if (leg_) close_leg(false);
}

void TrialEngine::emit_end() const {
    if (!log_) return;
    const RunMetrics m = metrics();
    emit({{"type", "end"},
          {"status", std::string(to_string(status_))},
          {"ticks", m.ticks},
          {"completion_time", m.completion_time},
          {"teleop_ticks", m.teleop_ticks},
          {"autonomy_ticks", m.autonomy_ticks},
          {"switches_total", m.switches_total},
          {"switches_ai", m.switches_ai},
          {"switches_human", m.switches_human},
          {"ai_interruptions_unattended", m.ai_interruptions_unattended},
          {"collisions", m.collisions},
          {"waypoints_reached", m.waypoints_reached},
          {"secondary",
           {{"items_presented", m.secondary.items_presented},
            {"items_completed", m.secondary.items_completed},
            {"interruptions", m.secondary.interruptions}}}});
}

TickRecord TrialEngine::step() {
    if (finished()) throw std::logic_error("trial already finished");
    ++tick_;
    const double t = time();
    TickRecord rec;
    rec.tick = tick_;
    rec.t = t;

    while (!queue_.empty()) {
        const Command c = std::move(queue_.front());
        queue_.pop_front();
        apply(c);
    }

    rec.yaw = pending_yaw_;
    rec.availability = tracker_.update(t, pending_yaw_);
    pending_yaw_.reset();

    const world::LaserScan scan =
        world::sense(true_grid(), state_, degradation_.noise, t, noise_rng_, scenario_.laser);
    belief_.integrate(scan, state_);
    rec.belief_changes = belief_.take_changes();

    const LoaMode loa = state_.active_loa;
    rec.loa_during_step = loa;
    world::VelocityCommand cmd;
    if (loa == LoaMode::Autonomy) {
        cmd = navigator_.update(belief_.grid(), state_).command;
    } else if (held_teleop_ && t - held_since_ <= scenario_.teleop_hold + time_eps) {
        cmd = *held_teleop_;
    }

    const nav::ExpertProfile expert = expert_.evaluate(state_, state_.current_goal);
    rec.expert_speed = expert.expected_speed;

    const world::Point before = state_.position();
    state_ = world::step(true_grid(), state_, cmd, dt_);
    if (leg_) leg_->odometry += world::distance(before, state_.position());
    if (state_.collided && !was_colliding_) ++metrics_.collisions;
    was_colliding_ = state_.collided;
    ++metrics_.ticks;
    ++(loa == LoaMode::Teleoperation ? metrics_.teleop_ticks : metrics_.autonomy_ticks);

    rec.decision = controller_.decide(expert.expected_speed, std::abs(state_.linear_speed),
                                      rec.availability.attending_degree, t);
    if (rec.decision.issued) record_switch(*rec.decision.issued, rec.availability.attending);

    if (const auto next = next_waypoint();
        next && world::distance(state_.position(), true_grid().center_of(*next)) <=
                    scenario_.waypoint_radius) {
        rec.reached = scenario_.waypoints[next_index_];
        ++metrics_.waypoints_reached;
        if (leg_ && leg_->goal == *next) close_leg(true);
        ++next_index_;
        if (state_.current_goal == *next) set_goal(std::nullopt);
        if (next_index_ == scenario_.waypoints.size()) finish(TrialStatus::Completed);
    }
    if (!finished() && t >= scenario_.timeout - time_eps) finish(TrialStatus::TimedOut);
    rec.state = state_;

    if (log_) {
        const auto& d = rec.decision;
        json j = {{"type", "tick"},
                  {"tick", tick_},
                  {"t", t},
                  {"x", state_.x},
                  {"y", state_.y},
                  {"heading", state_.heading},
                  {"v", state_.linear_speed},
                  {"w", state_.angular_speed},
                  {"loa", std::string(world::to_string(loa))},
                  {"goal", cell_json(state_.current_goal)},
                  {"yaw", rec.yaw ? json(*rec.yaw) : json(nullptr)},
                  {"availability", rec.availability.attending_degree},
                  {"attending", rec.availability.attending},
                  {"expert_speed", rec.expert_speed},
                  {"mean_error", d.mean_error},
                  {"error_high", d.input.error_high},
                  {"speed_low", d.input.speed_low},
                  {"rule", d.decision.firing_rule ? json(*d.decision.firing_rule) : json(nullptr)},
                  {"action", action_name(d.decision)},
                  {"suppressed", d.suppressed},
                  {"collided", state_.collided}};
        if (rec.reached) j["reached"] = std::string(1, *rec.reached);
        emit(j);
    }
    if (finished()) emit_end();
    last_tick_ = rec;
    return rec;
}

RunMetrics TrialEngine::metrics() const {
    RunMetrics m = metrics_;
    m.status = status_;
    m.completion_time = m.ticks * dt_;
    m.time_in_teleop = m.teleop_ticks * dt_;
    m.time_in_autonomy = m.autonomy_ticks * dt_;
    std::vector<std::pair<double, LoaMode>> changes;
    for (const auto& s : m.switches) changes.emplace_back(s.change.t, s.change.to);
    m.secondary = op::score_secondary(degradation_.distraction, changes);
    return m;
}

}  // namespace caami::harness
