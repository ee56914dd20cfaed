#pragma once

#include <optional>
#include <string_view>

#include "caami/mi/error_window.hpp"
#include "caami/mi/rules.hpp"

namespace caami::mi {

enum class Initiator { Ai, Human };
std::string_view to_string(Initiator who);

struct LoaSwitch {
    double t = 0.0;
    LoaMode from = LoaMode::Autonomy;
    LoaMode to = LoaMode::Teleoperation;
    Initiator initiator = Initiator::Ai;
    std::optional<int> rule;  // firing rule for AI switches

    friend bool operator==(const LoaSwitch&, const LoaSwitch&) = default;
};

struct ControllerParams {
    MembershipParams membership;
    double window_length = 5.0;   // s
    double cooldown = 3.0;        // s after any switch; 0 disables
    double activation_threshold = default_activation_threshold;
    /// Ignore the availability input (the plain MI controller).
    bool ignore_availability = false;
};

/// What the controller saw and decided on one tick.
struct DecisionRecord {
    double t = 0.0;
    double mean_error = 0.0;
    FuzzyInput input;
    SwitchDecision decision;
    bool suppressed = false;  // Switch held back by cooldown or disabled AI
    std::optional<LoaSwitch> issued;
};

/// Deterministic per-tick state machine around the rule base.
class MixedInitiativeController {
public:
    MixedInitiativeController(RuleBase rules, ControllerParams params,
                              LoaMode initial = LoaMode::Autonomy);

    static MixedInitiativeController mi(ControllerParams params = {},
                                        LoaMode initial = LoaMode::Autonomy);
    static MixedInitiativeController caa_mi(ControllerParams params = {},
                                            LoaMode initial = LoaMode::Autonomy);

    DecisionRecord decide(double expert_speed, double actual_speed, double availability_degree,
                          double t);

    /// Human requests are always honored; asking for the active mode is a no-op.
    std::optional<LoaSwitch> apply_operator_switch(LoaMode requested, double t);

    void notify_goal_change() { window_.reset(); }

    /// When false the controller still evaluates rules but never switches.
    void set_ai_enabled(bool enabled) { ai_enabled_ = enabled; }
    bool ai_enabled() const { return ai_enabled_; }

    LoaMode active_loa() const { return loa_; }
    bool in_cooldown(double t) const;
    const MotionErrorWindow& window() const { return window_; }
    const RuleBase& rules() const { return rules_; }
    const ControllerParams& params() const { return params_; }
    const std::optional<LoaSwitch>& last_switch() const { return last_switch_; }

private:
    LoaSwitch switch_to(LoaMode target, Initiator who, std::optional<int> rule, double t);

    RuleBase rules_;
    ControllerParams params_;
    LoaMode loa_;
    MotionErrorWindow window_;
    std::optional<LoaSwitch> last_switch_;
    bool ai_enabled_ = true;
};

}  // namespace caami::mi
