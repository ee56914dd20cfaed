#include "caami/mi/rules.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

namespace caami::mi {

void MembershipParams::validate() const {
    if (!(error_low >= 0.0 && error_low < error_high && speed_low >= 0.0 &&
          speed_low < speed_high)) {
        throw RuleBaseError("membership thresholds must satisfy 0 <= low < high");
    }
}

double rising(double x, double lo, double hi) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return (x - lo) / (hi - lo);
}

double falling(double x, double lo, double hi) {
    if (x <= lo) return 1.0;
    if (x >= hi) return 0.0;
    return (hi - x) / (hi - lo);
}

FuzzyInput fuzzify(double mean_error, double availability_degree, LoaMode loa, double speed,
                   const MembershipParams& params) {
    FuzzyInput in;
    in.error_high = rising(mean_error, params.error_low, params.error_high);
    in.availability = std::clamp(availability_degree, 0.0, 1.0);
    in.loa = loa;
    in.speed_low = falling(std::abs(speed), params.speed_low, params.speed_high);
    return in;
}

namespace {

struct TermName {
    Term term;
    std::string_view name;
};

constexpr std::array<TermName, 8> term_names{{
    {Term::ErrorHigh, "error_high"},
    {Term::ErrorLow, "error_low"},
    {Term::Available, "available"},
    {Term::Unavailable, "unavailable"},
    {Term::SpeedLow, "speed_low"},
    {Term::SpeedHigh, "speed_high"},
    {Term::LoaTeleoperation, "loa_teleoperation"},
    {Term::LoaAutonomy, "loa_autonomy"},
}};

std::optional<LoaMode> required_loa(const Rule& r) {
    for (Term t : r.antecedent) {
        if (t == Term::LoaTeleoperation) return LoaMode::Teleoperation;
        if (t == Term::LoaAutonomy) return LoaMode::Autonomy;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Term term) {
    for (const auto& tn : term_names) {
        if (tn.term == term) return tn.name;
    }
    return "?";
}

std::optional<Term> parse_term(std::string_view name) {
    for (const auto& tn : term_names) {
        if (tn.name == name) return tn.term;
    }
    return std::nullopt;
}

double degree(Term term, const FuzzyInput& in) {
    switch (term) {
        case Term::ErrorHigh: return in.error_high;
        case Term::ErrorLow: return 1.0 - in.error_high;
        case Term::Available: return in.availability;
        case Term::Unavailable: return 1.0 - in.availability;
        case Term::SpeedLow: return in.speed_low;
        case Term::SpeedHigh: return 1.0 - in.speed_low;
        case Term::LoaTeleoperation: return in.loa == LoaMode::Teleoperation ? 1.0 : 0.0;
        case Term::LoaAutonomy: return in.loa == LoaMode::Autonomy ? 1.0 : 0.0;
    }
    return 0.0;
}

double Rule::activation(const FuzzyInput& in) const {
    double a = 1.0;
    for (Term t : antecedent) a = std::min(a, degree(t, in));
    return a;
}

RuleBase::RuleBase(std::string name, std::vector<Rule> rules)
    : name_(std::move(name)), rules_(std::move(rules)) {
    if (rules_.empty()) {
        throw RuleBaseError("rule base '" + name_ + "' is empty");
    }
    std::stable_sort(rules_.begin(), rules_.end(),
                     [](const Rule& a, const Rule& b) { return a.priority < b.priority; });
    std::set<int> seen;
    for (const Rule& r : rules_) {
        const std::string where = "rule " + std::to_string(r.priority) + " of '" + name_ + "'";
        if (!seen.insert(r.priority).second) {
            throw RuleBaseError("duplicate priority in " + where);
        }
        if (r.antecedent.empty()) {
            throw RuleBaseError(where + " has no antecedent");
        }
        if (r.action == Action::Switch) {
            if (!r.target) {
                throw RuleBaseError(where + " switches without a target");
            }
            if (required_loa(r) != world::other(*r.target)) {
                throw RuleBaseError(where + " must require loa_" +
                                    std::string(world::to_string(world::other(*r.target))) +
                                    " to switch to " + std::string(world::to_string(*r.target)));
            }
        } else if (r.target) {
            throw RuleBaseError(where + " has a target but does not switch");
        }
    }
}

RuleBase RuleBase::mixed_initiative() {
    return RuleBase("mi", {
        {1, {Term::ErrorHigh, Term::SpeedLow, Term::LoaAutonomy}, Action::Switch,
         LoaMode::Teleoperation},
        {2, {Term::ErrorHigh, Term::SpeedLow, Term::LoaTeleoperation}, Action::Switch,
         LoaMode::Autonomy},
    });
}

RuleBase RuleBase::cognitive_availability_aware() {
    return RuleBase("caa-mi", {
        {1, {Term::Unavailable, Term::LoaTeleoperation}, Action::Switch, LoaMode::Autonomy},
        {2, {Term::Unavailable, Term::LoaAutonomy}, Action::NoSwitch, std::nullopt},
        {3, {Term::ErrorHigh, Term::SpeedLow, Term::LoaAutonomy}, Action::Switch,
         LoaMode::Teleoperation},
        {4, {Term::ErrorHigh, Term::SpeedLow, Term::LoaTeleoperation}, Action::Switch,
         LoaMode::Autonomy},
    });
}

RuleBase RuleBase::from_json(const nlohmann::json& j) {
    try {
        std::vector<Rule> rules;
        for (const auto& jr : j.at("rules")) {
            Rule r;
            r.priority = jr.at("priority").get<int>();
            for (const auto& jt : jr.at("if")) {
                const auto name = jt.get<std::string>();
                const auto term = parse_term(name);
                if (!term) throw RuleBaseError("unknown term '" + name + "'");
                r.antecedent.push_back(*term);
            }
            const auto then = jr.at("then").get<std::string>();
            if (then == "no_switch") {
                r.action = Action::NoSwitch;
            } else if (then.starts_with("switch_to_")) {
                r.action = Action::Switch;
                r.target = world::parse_loa(std::string_view(then).substr(10));
                if (!r.target) throw RuleBaseError("unknown switch target '" + then + "'");
            } else {
                throw RuleBaseError("unknown consequent '" + then + "'");
            }
            rules.push_back(std::move(r));
        }
        return RuleBase(j.value("name", std::string("custom")), std::move(rules));
    } catch (const nlohmann::json::exception& e) {
        throw RuleBaseError(std::string("malformed rule base: ") + e.what());
    }
}

nlohmann::json RuleBase::to_json() const {
    nlohmann::json rules = nlohmann::json::array();
    for (const Rule& r : rules_) {
        nlohmann::json terms = nlohmann::json::array();
        for (Term t : r.antecedent) terms.push_back(std::string(to_string(t)));
        rules.push_back({{"priority", r.priority},
                         {"if", terms},
                         {"then", r.action == Action::NoSwitch
                                      ? std::string("no_switch")
                                      : "switch_to_" + std::string(world::to_string(*r.target))}});
    }
    return {{"name", name_}, {"rules", rules}};
}

RuleBase load_rule_base(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RuleBaseError("cannot open rule base " + path);
    try {
        return RuleBase::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw RuleBaseError(path + ": " + e.what());
    }
}

SwitchDecision infer(const RuleBase& rules, const FuzzyInput& in, double activation_threshold) {
    for (const Rule& r : rules.rules()) {
        const double a = r.activation(in);
        if (a < activation_threshold) continue;
        SwitchDecision d;
        d.firing_rule = r.priority;
        d.activation = a;
        // Largest of maxima between the consequent (a) and its opposite (1 - a).
        const Action winner = a > 1.0 - a ? r.action : Action::NoSwitch;
        if (winner == Action::Switch) {
            d.action = Action::Switch;
            d.target = r.target;
        }
        return d;
    }
    return {};
}

}  // namespace caami::mi
