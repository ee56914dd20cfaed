#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "caami/world/types.hpp"

namespace caami::mi {

using world::LoaMode;

struct MembershipParams {
    double error_low = 0.1;   // m/s, error_high starts rising
    double error_high = 0.3;  // m/s, error_high saturates
    double speed_low = 0.1;   // m/s, speed_low starts falling
    double speed_high = 0.3;  // m/s, speed_low reaches 0

    void validate() const;
};

struct FuzzyInput {
    double error_high = 0.0;
    double availability = 1.0;
    LoaMode loa = LoaMode::Autonomy;
    double speed_low = 0.0;

    friend bool operator==(const FuzzyInput&, const FuzzyInput&) = default;
};

double rising(double x, double lo, double hi);
double falling(double x, double lo, double hi);

FuzzyInput fuzzify(double mean_error, double availability_degree, LoaMode loa, double speed,
                   const MembershipParams& params = {});

enum class Term {
    ErrorHigh,
    ErrorLow,
    Available,
    Unavailable,
    SpeedLow,
    SpeedHigh,
    LoaTeleoperation,
    LoaAutonomy,
};

std::string_view to_string(Term term);
std::optional<Term> parse_term(std::string_view name);
double degree(Term term, const FuzzyInput& in);

enum class Action { NoSwitch, Switch };

struct Rule {
    int priority = 0;  // lower fires first
    std::vector<Term> antecedent;
    Action action = Action::NoSwitch;
    std::optional<LoaMode> target;

    double activation(const FuzzyInput& in) const;
};

class RuleBaseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RuleBase {
public:
    /// Sorts by priority. Rejects an empty base, duplicate priorities, empty
    /// antecedents, and Switch rules that could target the active mode (each
    /// Switch rule must require the LOA term of the mode it leaves).
    RuleBase(std::string name, std::vector<Rule> rules);

    const std::string& name() const { return name_; }
    const std::vector<Rule>& rules() const { return rules_; }

    static RuleBase mixed_initiative();
    static RuleBase cognitive_availability_aware();

    static RuleBase from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

private:
    std::string name_;
    std::vector<Rule> rules_;
};

RuleBase load_rule_base(const std::string& path);

struct SwitchDecision {
    Action action = Action::NoSwitch;
    std::optional<LoaMode> target;
    std::optional<int> firing_rule;
    double activation = 0.0;

    friend bool operator==(const SwitchDecision&, const SwitchDecision&) = default;
};

inline constexpr double default_activation_threshold = 0.5;

/// First rule (by priority) whose activation reaches the threshold decides.
/// Its consequent competes with the implicit opposite at 1 - activation; the
/// larger wins and a tie keeps NoSwitch.
SwitchDecision infer(const RuleBase& rules, const FuzzyInput& in,
                     double activation_threshold = default_activation_threshold);

}  // namespace caami::mi
