#include "caami/harness/trial.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "caami/operator/operator.hpp"

namespace caami::harness {

using nlohmann::json;

namespace {

TrialEngine::LogSink stream_sink(std::ostream* out) {
    if (!out) return nullptr;
    return [out](const json& j) { *out << j.dump() << '\n'; };
}

}  // namespace

TrialResult run_trial(const Scenario& scenario, Variant variant, std::uint64_t seed,
                      std::ostream* log) {
    TrialEngine engine(scenario, variant, seed, stream_sink(log));
    const op::DistractionSchedule& distraction = engine.degradation().distraction;
    op::ScriptedOperator operator_agent(scenario.operator_profile, distraction, scenario.arena.grid,
                                        seed);
    Rng head = make_stream(seed, stream::head_jitter);
    try {
        while (!engine.finished()) {
            const double t_next = (engine.tick() + 1) * engine.dt();
            engine.queue(YawSampleCommand{op::yaw_trace(distraction, t_next, head).yaw});
            engine.step();
            const op::OperatorAction a =
                operator_agent.act({engine.time(), engine.state(), engine.next_waypoint()});
            if (a.request_loa) engine.queue(RequestLoaCommand{*a.request_loa});
            if (a.goal_click) engine.queue(SetGoalCommand{*a.goal_click});
            if (a.teleop) engine.queue(TeleopCommand{*a.teleop});
        }
    } catch (const nav::UnreachableGoal& e) {
        throw ScenarioError(std::string("seed ") + std::to_string(seed) + ": " + e.what());
    }
    return {variant, seed, engine.degradation(), engine.metrics(), std::nullopt};
}

std::string log_file_name(Variant variant, std::uint64_t seed) {
    return std::string(to_string(variant)) + "_seed" + std::to_string(seed) + ".jsonl";
}

std::vector<TrialResult> run_batch(const Scenario& scenario, const BatchOptions& options) {
    if (options.runs < 0) throw std::invalid_argument("runs must be non-negative");
    if (options.log_dir) std::filesystem::create_directories(*options.log_dir);
    std::vector<TrialResult> results;
    for (int i = 0; i < options.runs; ++i) {
        const std::uint64_t seed = options.seed_base + static_cast<std::uint64_t>(i);
        for (Variant v : options.variants) {
            TrialResult r;
            try {
                if (options.log_dir) {
                    const auto path = *options.log_dir / log_file_name(v, seed);
                    std::ofstream out(path, std::ios::binary);
                    if (!out) throw std::runtime_error("cannot write " + path.string());
                    r = run_trial(scenario, v, seed, &out);
                } else {
                    r = run_trial(scenario, v, seed);
                }
            } catch (const std::exception& e) {
                r = {v, seed, place_degradation(scenario, seed), {}, std::string(e.what())};
            }
            if (options.on_trial) options.on_trial(r);
            results.push_back(std::move(r));
        }
    }
    return results;
}

namespace {

std::vector<json> read_records(std::istream& in) {
    std::vector<json> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw std::runtime_error("log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (records.empty() || records.front().value("type", "") != "header") {
        throw std::runtime_error("decision log must start with a header record");
    }
    return records;
}

}  // namespace

ReplayResult replay_log(std::istream& log) {
    const std::vector<json> records = read_records(log);
    ReplayResult out;
    try {
        const json& header = records.front();
        const auto variant = parse_variant(header.at("variant").get<std::string>());
        if (!variant) throw std::runtime_error("unknown variant in header");
        out.variant = *variant;
        out.seed = header.at("seed").get<std::uint64_t>();
        const double dt = header.at("dt").get<double>();
        const json& d = header.at("distraction");
        const op::DistractionSchedule distraction{
            d.at("start").get<double>(), d.at("end").get<double>(),
            d.at("head_turn_yaw").get<double>(), d.at("item_period").get<double>()};

        RunMetrics& m = out.metrics;
        bool was_colliding = false;
        std::vector<std::pair<double, LoaMode>> changes;
        for (const json& r : records) {
            const auto type = r.at("type").get<std::string>();
            if (type == "tick") {
                ++m.ticks;
                const auto loa = world::parse_loa(r.at("loa").get<std::string>());
                ++(loa == LoaMode::Teleoperation ? m.teleop_ticks : m.autonomy_ticks);
                const bool collided = r.at("collided").get<bool>();
                if (collided && !was_colliding) ++m.collisions;
                was_colliding = collided;
                if (r.contains("reached")) ++m.waypoints_reached;
            } else if (type == "switch") {
                mi::LoaSwitch s;
                s.t = r.at("t").get<double>();
                s.from = *world::parse_loa(r.at("from").get<std::string>());
                s.to = *world::parse_loa(r.at("to").get<std::string>());
                s.initiator = r.at("initiator").get<std::string>() == "ai" ? mi::Initiator::Ai
                                                                            : mi::Initiator::Human;
                if (!r.at("rule").is_null()) s.rule = r.at("rule").get<int>();
                const bool attending = r.at("attending").get<bool>();
                ++m.switches_total;
                if (s.initiator == mi::Initiator::Ai) {
                    ++m.switches_ai;
                    if (!attending && s.from == LoaMode::Autonomy &&
                        s.to == LoaMode::Teleoperation) {
                        ++m.ai_interruptions_unattended;
                    }
                } else {
                    ++m.switches_human;
                }
                m.switches.push_back({s, attending});
                changes.emplace_back(s.t, s.to);
            } else if (type == "leg") {
                LegRecord leg;
                leg.waypoint = r.at("waypoint").get<std::string>().at(0);
                leg.goal = {r.at("goal")[0].get<int>(), r.at("goal")[1].get<int>()};
                leg.t_start = r.at("t_start").get<double>();
                leg.t_end = r.at("t_end").get<double>();
                leg.expert_length = r.at("expert_length").get<double>();
                leg.odometry = r.at("odometry").get<double>();
                leg.completed = r.at("completed").get<bool>();
                m.legs.push_back(leg);
            } else if (type == "end") {
                RunMetrics e;
                const auto status = r.at("status").get<std::string>();
                e.status = status == "completed" ? TrialStatus::Completed
                           : status == "timeout" ? TrialStatus::TimedOut
                                                 : TrialStatus::Running;
                e.ticks = r.at("ticks").get<int>();
                e.completion_time = r.at("completion_time").get<double>();
                e.teleop_ticks = r.at("teleop_ticks").get<int>();
                e.autonomy_ticks = r.at("autonomy_ticks").get<int>();
                e.switches_total = r.at("switches_total").get<int>();
                e.switches_ai = r.at("switches_ai").get<int>();
                e.switches_human = r.at("switches_human").get<int>();
                e.ai_interruptions_unattended = r.at("ai_interruptions_unattended").get<int>();
                e.collisions = r.at("collisions").get<int>();
                e.waypoints_reached = r.at("waypoints_reached").get<int>();
                const json& s = r.at("secondary");
                e.secondary = {s.at("items_presented").get<int>(),
                               s.at("items_completed").get<int>(),
                               s.at("interruptions").get<int>()};
                m.status = e.status;
                out.logged = e;
            }
        }
        m.completion_time = m.ticks * dt;
        m.time_in_teleop = m.teleop_ticks * dt;
        m.time_in_autonomy = m.autonomy_ticks * dt;
        m.secondary = op::score_secondary(distraction, changes);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed decision log: ") + e.what());
    }

    if (out.logged) {
        const RunMetrics& a = out.metrics;
        const RunMetrics& b = *out.logged;
        auto cmp = [&](const char* name, auto x, auto y) {
            if (x != y) {
                std::ostringstream msg;
                msg << name << ": derived " << x << ", logged " << y;
                out.mismatches.push_back(msg.str());
            }
        };
        cmp("ticks", a.ticks, b.ticks);
        cmp("completion_time", a.completion_time, b.completion_time);
        cmp("teleop_ticks", a.teleop_ticks, b.teleop_ticks);
        cmp("autonomy_ticks", a.autonomy_ticks, b.autonomy_ticks);
        cmp("switches_total", a.switches_total, b.switches_total);
        cmp("switches_ai", a.switches_ai, b.switches_ai);
        cmp("switches_human", a.switches_human, b.switches_human);
        cmp("ai_interruptions_unattended", a.ai_interruptions_unattended,
            b.ai_interruptions_unattended);
        cmp("collisions", a.collisions, b.collisions);
        cmp("waypoints_reached", a.waypoints_reached, b.waypoints_reached);
        cmp("items_presented", a.secondary.items_presented, b.secondary.items_presented);
        cmp("items_completed", a.secondary.items_completed, b.secondary.items_completed);
        cmp("interruptions", a.secondary.interruptions, b.secondary.interruptions);
    }
    return out;
}

std::string resimulate_log(std::istream& log) {
    const std::vector<json> records = read_records(log);
    const json& header = records.front();
    const Scenario scenario = parse_scenario(header.at("scenario"));
    const auto variant = parse_variant(header.at("variant").get<std::string>());
    if (!variant) throw std::runtime_error("unknown variant in header");
    const auto seed = header.at("seed").get<std::uint64_t>();

    std::map<int, std::vector<Command>> commands;
    int last_tick = 0;
    for (const json& r : records) {
        const auto type = r.at("type").get<std::string>();
        if (type == "command") {
            commands[r.at("tick").get<int>()].push_back(command_from_json(r.at("command")));
        } else if (type == "tick") {
            last_tick = std::max(last_tick, r.at("tick").get<int>());
        }
    }

    std::ostringstream out;
    TrialEngine engine(scenario, *variant, seed, stream_sink(&out));
    while (!engine.finished() && engine.tick() < last_tick) {
        if (auto it = commands.find(engine.tick() + 1); it != commands.end()) {
            for (const auto& c : it->second) engine.queue(c);
        }
        engine.step();
    }
    return out.str();
}

}  // namespace caami::harness
