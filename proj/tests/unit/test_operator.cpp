#include <cmath>

#include "doctest.h"

#include "caami/operator/operator.hpp"
#include "caami/world/kinematics.hpp"

using namespace caami;
using namespace caami::op;

namespace {

OccupancyGrid corridor() {
    // 12 m x 1.5 m corridor at 0.25 m cells.
    OccupancyGrid g(48, 6, 0.25);
    g.fill_border();
    return g;
}

Observation observe(double t, const RobotState& s, std::optional<CellIndex> next) {
    return {t, s, next};
}

}  // namespace

TEST_CASE("yaw trace shape") {
    const DistractionSchedule s{20.0, 50.0, 60.0, 3.0};
    Rng rng(4);
    int baseline_in = 0;
    int plateau_in = 0;
    for (int i = 0; i < 1000; ++i) {
        baseline_in += std::abs(yaw_trace(s, 10.0, rng).yaw) <= 6.0;
        plateau_in += std::abs(yaw_trace(s, 35.0, rng).yaw - 60.0) <= 6.0;
    }
    // 3 sd bands hold 99.7% of samples.
    CHECK(baseline_in >= 990);
    CHECK(plateau_in >= 990);
    CHECK(yaw_profile(s, 19.9) == 0.0);
    CHECK(yaw_profile(s, 20.15) == doctest::Approx(30.0));
    CHECK(yaw_profile(s, 35.0) == 60.0);
    CHECK(yaw_profile(s, 50.15) == doctest::Approx(30.0));
    CHECK(yaw_profile(s, 50.31) == 0.0);

    // Jitter is N(0, 2): sample sd close to 2.
    double ss = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ss += std::pow(yaw_trace(s, 35.0, rng).yaw - 60.0, 2);
    CHECK(std::sqrt(ss / n) == doctest::Approx(2.0).epsilon(0.05));
    const DistractionSchedule hard{0.0, 10.0, 90.0, 1.0};
    for (int i = 0; i < 100; ++i) CHECK(yaw_trace(hard, 5.0, rng).yaw <= 90.0);
}

TEST_CASE("secondary score examples") {
    const DistractionSchedule s{10.0, 30.0, 60.0, 4.0};
    CHECK(score_secondary(s, {}) == SecondaryScore{5, 5, 0});
    CHECK(score_secondary(s, {{16.0, LoaMode::Teleoperation}}) == SecondaryScore{5, 4, 1});
    // Two interruptions in the same item void it once.
    CHECK(score_secondary(s, {{16.0, LoaMode::Teleoperation}, {17.0, LoaMode::Teleoperation}}) ==
          SecondaryScore{5, 4, 2});
    // Switches to Autonomy, or outside the interval, do not interrupt.
    CHECK(score_secondary(s, {{16.0, LoaMode::Autonomy}, {5.0, LoaMode::Teleoperation},
                              {30.0, LoaMode::Teleoperation}}) == SecondaryScore{5, 5, 0});
}

TEST_CASE("distracted operator is silent") {
    const DistractionSchedule s{0.0, 30.0, 60.0, 3.0};
    ScriptedOperator op({}, s, corridor(), 1);
    RobotState r;
    r.x = 1.0;
    r.y = 0.75;
    for (LoaMode m : {LoaMode::Autonomy, LoaMode::Teleoperation}) {
        r.active_loa = m;
        for (int k = 0; k < 250; ++k) CHECK(op.act(observe(k * 0.1, r, CellIndex{40, 3})).empty());
    }
}

TEST_CASE("attending operator clicks the next waypoint after its reaction delay") {
    const DistractionSchedule s{100.0, 130.0, 60.0, 3.0};
    ScriptedOperator op({}, s, corridor(), 1);
    RobotState r;
    r.x = 1.0;
    r.y = 0.75;
    std::optional<double> clicked_at;
    for (int k = 0; k < 20 && !clicked_at; ++k) {
        const auto a = op.act(observe(k * 0.1, r, CellIndex{40, 3}));
        CHECK_FALSE(a.teleop);
        if (a.goal_click) {
            CHECK(*a.goal_click == CellIndex{40, 3});
            clicked_at = k * 0.1;
        }
    }
    REQUIRE(clicked_at);
    CHECK(*clicked_at == doctest::Approx(0.4));
}

TEST_CASE("stall triggers a manual LOA request") {
    const DistractionSchedule s{100.0, 130.0, 60.0, 3.0};
    ScriptedOperator op({}, s, corridor(), 1);
    RobotState r;
    r.x = 1.0;
    r.y = 0.75;
    r.current_goal = CellIndex{40, 3};
    std::optional<double> asked;
    for (int k = 0; k < 100 && !asked; ++k) {
        const auto a = op.act(observe(k * 0.1, r, CellIndex{40, 3}));
        if (a.request_loa) {
            CHECK(*a.request_loa == LoaMode::Teleoperation);
            asked = k * 0.1;
        }
    }
    REQUIRE(asked);
    CHECK(*asked == doctest::Approx(4.4));
}

TEST_CASE("teleop along an 8 m corridor takes about 8 / (skill v_max)") {
    const auto grid = corridor();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        OperatorProfile p;
        p.teleop_skill = 0.8;
        ScriptedOperator op(p, {500.0, 530.0, 60.0, 3.0}, grid, seed);
        RobotState r;
        const auto start = grid.center_of({4, 3});
        r.x = start.x;
        r.y = start.y;
        r.active_loa = LoaMode::Teleoperation;
        const CellIndex goal{36, 3};
        r.current_goal = goal;
        REQUIRE(world::distance(grid.center_of(goal), start) == doctest::Approx(8.0));
        double t = 0.0;
        while (world::distance(r.position(), grid.center_of(goal)) > 0.5 && t < 30.0) {
            const auto a = op.act(observe(t, r, goal));
            REQUIRE(a.teleop);
            r = world::step(grid, r, *a.teleop, 0.1);
            CHECK_FALSE(r.collided);
            t += 0.1;
        }
        CHECK(t == doctest::Approx(8.0 / 0.8).epsilon(0.10));
    }
}

TEST_CASE("operator actions are deterministic per seed") {
    const auto grid = corridor();
    auto run = [&](std::uint64_t seed) {
        ScriptedOperator op({}, {3.0, 6.0, 60.0, 1.0}, grid, seed);
        RobotState r;
        r.x = 1.125;
        r.y = 0.875;
        r.active_loa = LoaMode::Teleoperation;
        std::vector<double> trace;
        for (int k = 0; k < 100; ++k) {
            const auto a = op.act(observe(k * 0.1, r, CellIndex{40, 3}));
            if (a.teleop) r = world::step(grid, r, *a.teleop, 0.1);
            trace.push_back(r.x);
            trace.push_back(r.heading);
        }
        return trace;
    };
    CHECK(run(5) == run(5));
    CHECK(run(5) != run(6));
}
