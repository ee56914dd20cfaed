#include "caami/operator/operator.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "caami/nav/planner.hpp"
#include "caami/world/kinematics.hpp"

namespace caami::op {

void OperatorProfile::validate() const {
    if (!(teleop_skill > 0.0 && teleop_skill <= 1.0)) {
        throw std::invalid_argument("teleop_skill must be in (0, 1]");
    }
    if (!(steering_noise >= 0.0 && reaction_delay >= 0.0 && manual_switch_patience > 0.0)) {
        throw std::invalid_argument("operator noise, delay and patience must be non-negative");
    }
}

void DistractionSchedule::validate() const {
    if (!(start <= end)) throw std::invalid_argument("distraction start must not follow its end");
    if (!(item_period > 0.0)) throw std::invalid_argument("item_period must be positive");
    if (!(std::abs(head_turn_yaw) <= attention::max_yaw)) {
        throw std::invalid_argument("head_turn_yaw must be within [-90, 90]");
    }
}

double yaw_profile(const DistractionSchedule& s, double t) {
    auto ramp = [](double x) { return std::clamp(x / head_turn_time, 0.0, 1.0); };
    if (t < s.end) {
        return s.head_turn_yaw * ramp(t - s.start);
    }
    const double at_end = s.head_turn_yaw * ramp(s.end - s.start);
    return at_end * (1.0 - ramp(t - s.end));
}

attention::HeadPoseSample yaw_trace(const DistractionSchedule& schedule, double t, Rng& rng) {
    std::normal_distribution<double> jitter(0.0, head_jitter_sd);
    const double yaw = yaw_profile(schedule, t) + jitter(rng);
    return {t, std::clamp(yaw, -attention::max_yaw, attention::max_yaw)};
}

SecondaryScore score_secondary(const DistractionSchedule& schedule,
                               const std::vector<std::pair<double, LoaMode>>& switches) {
    SecondaryScore score;
    score.items_presented =
        static_cast<int>(std::floor((schedule.end - schedule.start) / schedule.item_period + 1e-9));
    std::set<int> voided;
    for (const auto& [t, to] : switches) {
        if (to != LoaMode::Teleoperation || !schedule.active(t)) continue;
        ++score.interruptions;
        const int item = static_cast<int>(std::floor((t - schedule.start) / schedule.item_period));
        if (item < score.items_presented) voided.insert(item);
    }
    score.items_completed = score.items_presented - static_cast<int>(voided.size());
    return score;
}

ScriptedOperator::ScriptedOperator(OperatorProfile profile, DistractionSchedule schedule,
                                   OccupancyGrid map, std::uint64_t seed)
    : profile_(profile),
      schedule_(schedule),
      map_(std::move(map)),
      steering_rng_(make_stream(seed, stream::operator_steering)) {
    profile_.validate();
    schedule_.validate();
}

nav::FollowerParams ScriptedOperator::drive_params() const {
    nav::FollowerParams p;
    p.limits.max_linear *= profile_.teleop_skill;
    // A person drives through a waypoint rather than parking on it.
    p.decel_radius = 0.5;
    p.line_of_sight = true;
    return p;
}

void ScriptedOperator::schedule_action(double t, OperatorAction a) {
    pending_.push_back({t + profile_.reaction_delay, a});
}

bool ScriptedOperator::stalled(const Observation& obs) {
    const double t = obs.t;
    history_.emplace_back(t, obs.robot.position());
    const double window_start = t - profile_.manual_switch_patience;
    while (history_.size() >= 2 && history_[1].first <= window_start + 1e-9) {
        history_.pop_front();
    }
    if (history_.front().first > window_start + 1e-9) {
        return false;  // not watched long enough yet
    }
    const world::Point anchor = history_.front().second;
    return std::all_of(history_.begin(), history_.end(), [&](const auto& h) {
        return world::distance(anchor, h.second) < stall_distance;
    });
}

VelocityCommand ScriptedOperator::drive(const Observation& obs) {
    const CellIndex target = *obs.next_waypoint;
    const world::Point pos = obs.robot.position();
    bool replan = !drive_path_ || drive_path_->goal() != target;
    if (!replan) {
        double nearest = INFINITY;
        for (const auto& c : drive_path_->waypoints) {
            nearest = std::min(nearest, world::distance(map_.center_of(c), pos));
        }
        replan = nearest > 1.0;
    }
    if (replan) {
        const CellIndex start = nav::robot_cell(map_, pos);
        drive_path_ = nav::plan(map_, start, target);
    }
    if (!drive_path_) {
        return {};
    }
    const auto params = drive_params();
    const auto r = nav::follow(map_, *drive_path_, obs.robot, params);
    std::normal_distribution<double> noise(0.0, profile_.steering_noise);
    VelocityCommand cmd = r.command;
    cmd.angular += params.turn_gain * noise(steering_rng_);
    return world::clamp_command(cmd, params.limits);
}

OperatorAction ScriptedOperator::act(const Observation& obs) {
    const double t = obs.t;
    if (schedule_.active(t)) {
        pending_.clear();
        history_.clear();
        clicked_.reset();
        requested_.reset();
        return {};
    }
    if (last_loa_ != obs.robot.active_loa) {
        history_.clear();
        requested_.reset();
        last_loa_ = obs.robot.active_loa;
    }
    OperatorAction out;
    while (!pending_.empty() && pending_.front().due <= t + 1e-9) {
        const OperatorAction& a = pending_.front().action;
        if (a.goal_click) {
            out.goal_click = a.goal_click;
            clicked_.reset();
        }
        if (a.request_loa) {
            out.request_loa = a.request_loa;
            requested_.reset();
        }
        pending_.pop_front();
    }
    if (!obs.next_waypoint) {
        return out;
    }
    const CellIndex next = *obs.next_waypoint;
    if (obs.robot.current_goal != next && clicked_ != next && out.goal_click != next) {
        OperatorAction click;
        click.goal_click = next;
        schedule_action(t, click);
        clicked_ = next;
    }
    if (stalled(obs) && !requested_ && !out.request_loa) {
        const LoaMode want = world::other(obs.robot.active_loa);
        OperatorAction request;
        request.request_loa = want;
        schedule_action(t, request);
        requested_ = want;
        history_.clear();
    }
    if (obs.robot.active_loa == LoaMode::Teleoperation) {
        out.teleop = drive(obs);
    }
    return out;
}

}  // namespace caami::op
