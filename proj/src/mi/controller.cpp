#include "caami/mi/controller.hpp"

namespace caami::mi {

std::string_view to_string(Initiator who) {
    return who == Initiator::Ai ? "ai" : "human";
}

MixedInitiativeController::MixedInitiativeController(RuleBase rules, ControllerParams params,
                                                     LoaMode initial)
    : rules_(std::move(rules)), params_(params), loa_(initial), window_(params.window_length) {
    params_.membership.validate();
    if (params_.cooldown < 0.0) {
        throw RuleBaseError("cooldown must be non-negative");
    }
}

MixedInitiativeController MixedInitiativeController::mi(ControllerParams params,
                                                        LoaMode initial) {
    params.ignore_availability = true;
    return {RuleBase::mixed_initiative(), params, initial};
}

MixedInitiativeController MixedInitiativeController::caa_mi(ControllerParams params,
                                                            LoaMode initial) {
    return {RuleBase::cognitive_availability_aware(), params, initial};
}

bool MixedInitiativeController::in_cooldown(double t) const {
    // Small slack so "3 s later" on a 0.1 s tick grid counts as elapsed.
    return last_switch_ && t - last_switch_->t < params_.cooldown - 1e-9;
}

LoaSwitch MixedInitiativeController::switch_to(LoaMode target, Initiator who,
                                               std::optional<int> rule, double t) {
    LoaSwitch s{t, loa_, target, who, rule};
    loa_ = target;
    last_switch_ = s;
    window_.reset();
    return s;
}

DecisionRecord MixedInitiativeController::decide(double expert_speed, double actual_speed,
                                                 double availability_degree, double t) {
    DecisionRecord rec;
    rec.t = t;
    rec.mean_error = window_.update(expert_speed, actual_speed, t);
    const double availability = params_.ignore_availability ? 1.0 : availability_degree;
    rec.input = fuzzify(rec.mean_error, availability, loa_, actual_speed, params_.membership);
    rec.decision = infer(rules_, rec.input, params_.activation_threshold);
    if (rec.decision.action == Action::Switch) {
        if (!ai_enabled_ || in_cooldown(t)) {
            rec.suppressed = true;
        } else {
            rec.issued = switch_to(*rec.decision.target, Initiator::Ai, rec.decision.firing_rule, t);
        }
    }
    return rec;
}

std::optional<LoaSwitch> MixedInitiativeController::apply_operator_switch(LoaMode requested,
                                                                          double t) {
    if (requested == loa_) {
        return std::nullopt;
    }
    return switch_to(requested, Initiator::Human, std::nullopt, t);
}

}  // namespace caami::mi
