#include <cmath>
#include <numbers>

#include "doctest.h"

#include "caami/nav/autonomy.hpp"
#include "caami/nav/expert.hpp"
#include "caami/nav/free_space.hpp"
#include "caami/nav/planner.hpp"
#include "caami/world/kinematics.hpp"
#include "caami/world/random.hpp"
#include "support/oracles.hpp"

using namespace caami;
using namespace caami::nav;
using world::Cell;

namespace {

OccupancyGrid walled(int w, int h, double res = 0.25) {
    OccupancyGrid g(w, h, res);
    g.fill_border();
    return g;
}

RobotState pose(double x, double y, double heading = 0.0) {
    RobotState s;
    s.x = x;
    s.y = y;
    s.heading = heading;
    return s;
}

OccupancyGrid random_grid(Rng& rng) {
    std::uniform_int_distribution<int> dim(2, 12);
    std::uniform_real_distribution<double> density(0.0, 0.45);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    OccupancyGrid g(dim(rng), dim(rng), 0.25);
    const double p = density(rng);
    for (int y = 0; y < g.height(); ++y) {
        for (int x = 0; x < g.width(); ++x) {
            if (unit(rng) < p) g.set({x, y}, Cell::Occupied);
        }
    }
    return g;
}

void check_path_invariants(const OccupancyGrid& g, const Path& p, CellIndex s, CellIndex e) {
    REQUIRE_FALSE(p.empty());
    CHECK(p.waypoints.front() == s);
    CHECK(p.waypoints.back() == e);
    double sum = 0.0;
    for (std::size_t i = 1; i < p.waypoints.size(); ++i) {
        const int dx = std::abs(p.waypoints[i].x - p.waypoints[i - 1].x);
        const int dy = std::abs(p.waypoints[i].y - p.waypoints[i - 1].y);
        REQUIRE(std::max(dx, dy) == 1);
        REQUIRE(g.free(p.waypoints[i]));
        sum += (dx + dy == 2 ? std::numbers::sqrt2 : 1.0) * g.resolution();
    }
    CHECK(p.total_length == doctest::Approx(sum).epsilon(1e-12));
}

}  // namespace

TEST_CASE("plan: trivial cases") {
    const OccupancyGrid g(5, 5, 0.25);
    const auto same = plan(g, {2, 2}, {2, 2});
    REQUIRE(same);
    CHECK(same->waypoints.size() == 1);
    CHECK(same->total_length == 0.0);

    const auto diag = plan(g, {0, 0}, {4, 4});
    REQUIRE(diag);
    CHECK(diag->total_length == doctest::Approx(4 * std::numbers::sqrt2 * 0.25).epsilon(1e-15));
    CHECK(diag->diagonal_steps == 4);
    check_path_invariants(g, *diag, {0, 0}, {4, 4});
}

TEST_CASE("plan: wall with a single gap matches the oracle") {
    OccupancyGrid g(9, 9, 0.25);
    for (int y = 0; y < 9; ++y) {
        if (y != 6) g.set({4, y}, Cell::Occupied);
    }
    const auto p = plan(g, {1, 1}, {7, 1});
    REQUIRE(p);
    check_path_invariants(g, *p, {1, 1}, {7, 1});
    const auto expected = oracle::ucs_cost(g, {1, 1}, {7, 1});
    REQUIRE(expected);
    CHECK(p->total_length == *expected);
    // Passes through the gap.
    bool through_gap = false;
    for (const auto& c : p->waypoints) through_gap |= (c == CellIndex{4, 6});
    CHECK(through_gap);
}

TEST_CASE("plan: unreachable or blocked endpoints give no path") {
    OccupancyGrid g(9, 9, 0.25);
    for (int y = 0; y < 9; ++y) g.set({4, y}, Cell::Occupied);
    CHECK_FALSE(plan(g, {1, 1}, {7, 1}));
    CHECK_FALSE(plan(g, {4, 1}, {7, 1}));
    CHECK_FALSE(plan(g, {1, 1}, {4, 4}));
    CHECK_FALSE(plan(g, {1, 1}, {20, 1}));
}

TEST_CASE("plan: never cuts occupied corners") {
    OccupancyGrid g(4, 4, 0.25);
    g.set({1, 0}, Cell::Occupied);
    const auto p = plan(g, {0, 0}, {1, 1});
    REQUIRE(p);
    CHECK(p->waypoints.size() == 3);
    CHECK(p->total_length == doctest::Approx(0.5));
}

TEST_CASE("plan: cost equals uniform-cost search on random grids") {
    Rng rng(11);
    int compared = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const OccupancyGrid g = random_grid(rng);
        std::uniform_int_distribution<int> ux(0, g.width() - 1);
        std::uniform_int_distribution<int> uy(0, g.height() - 1);
        const CellIndex s{ux(rng), uy(rng)};
        const CellIndex e{ux(rng), uy(rng)};
        const auto p = plan(g, s, e);
        const auto o = oracle::ucs_cost(g, s, e);
        REQUIRE(p.has_value() == o.has_value());
        if (p) {
            REQUIRE(p->total_length == *o);
            check_path_invariants(g, *p, s, e);
            ++compared;
        }
    }
    CHECK(compared > 100);
}

TEST_CASE("plan: equal-cost ties resolve the same way every time") {
    const OccupancyGrid g(8, 8, 0.25);
    const auto a = plan(g, {0, 0}, {5, 2});
    const auto b = plan(g, {0, 0}, {5, 2});
    REQUIRE(a);
    CHECK(*a == *b);
}

TEST_CASE("follow: at goal emits a zero command") {
    const OccupancyGrid g = walled(20, 20);
    const auto p = plan(g, {2, 2}, {10, 2});
    const auto r = follow(g, *p, pose(g.center_of({10, 2}).x, g.center_of({10, 2}).y, 1.0));
    CHECK(r.goal_reached);
    CHECK(r.command == VelocityCommand{0.0, 0.0});
}

TEST_CASE("follow: cruise on an aligned straight segment") {
    const OccupancyGrid g = walled(60, 10);
    const auto p = plan(g, {2, 5}, {55, 5});
    const Point start = g.center_of({2, 5});
    const auto r = follow(g, *p, pose(start.x, start.y, 0.0));
    CHECK_FALSE(r.goal_reached);
    CHECK(r.command.linear == doctest::Approx(1.0));
    CHECK(std::abs(r.command.angular) < 1e-12);
}

TEST_CASE("follow: deceleration ramp halves speed at 0.75 m") {
    const OccupancyGrid g = walled(60, 10);
    const auto p = plan(g, {2, 5}, {30, 5});
    const Point goal = g.center_of({30, 5});
    const auto r = follow(g, *p, pose(goal.x - 0.75, goal.y, 0.0));
    CHECK(std::abs(r.command.linear - 0.5) < 1e-6);
    CHECK(r.remaining == doctest::Approx(0.75));
}

TEST_CASE("follow: converges within three times the straight-line time") {
    const OccupancyGrid g = walled(96, 96);
    Rng rng(21);
    std::uniform_int_distribution<int> cell(4, 91);
    std::uniform_real_distribution<double> heading(-3.0, 3.0);
    int trials = 0;
    while (trials < 40) {
        const CellIndex s{cell(rng), cell(rng)};
        const CellIndex e{cell(rng), cell(rng)};
        const double d = world::distance(g.center_of(s), g.center_of(e));
        if (d < 2.0) continue;
        ++trials;
        const auto p = plan(g, s, e);
        REQUIRE(p);
        RobotState st = pose(g.center_of(s).x, g.center_of(s).y, heading(rng));
        const double budget = 3.0 * d / 1.0;
        double t = 0.0;
        bool reached = false;
        while (t <= budget + 1e-9) {
            const auto r = follow(g, *p, st);
            if (r.goal_reached) {
                reached = true;
                break;
            }
            st = world::step(g, st, r.command, 0.1);
            t += 0.1;
        }
        CHECK_MESSAGE(reached, "goal at distance " << d << " not reached in " << budget << " s");
    }
}

TEST_CASE("replan_if_blocked") {
    OccupancyGrid g = walled(40, 20);
    const auto p = plan(g, {2, 10}, {35, 10});
    REQUIRE(p);
    const Point s = g.center_of({2, 10});
    const RobotState st = pose(s.x, s.y, 0.0);

    SUBCASE("clean belief keeps the path") {
        const auto same = replan_if_blocked(g, *p, st);
        REQUIRE(same);
        CHECK(*same == *p);
    }
    SUBCASE("phantom ahead forces a detour") {
        OccupancyGrid belief = g;
        belief.set({6, 10}, Cell::Occupied);
        const auto detour = replan_if_blocked(belief, *p, st);
        REQUIRE(detour);
        CHECK(*detour != *p);
        CHECK(detour->total_length >= p->total_length);
        for (const auto& c : detour->waypoints) CHECK(belief.free(c));
        CHECK(detour->total_length == *oracle::ucs_cost(belief, {2, 10}, {35, 10}));
    }
    SUBCASE("phantom beyond two meters is ignored") {
        OccupancyGrid belief = g;
        belief.set({20, 10}, Cell::Occupied);
        CHECK(*replan_if_blocked(belief, *p, st) == *p);
    }
    SUBCASE("phantom wall sealing the goal") {
        OccupancyGrid belief = g;
        for (int y = 0; y < 20; ++y) belief.set({5, y}, Cell::Occupied);
        CHECK_FALSE(replan_if_blocked(belief, *p, st));
    }
}

TEST_CASE("autonomous navigator drives to its goal") {
    const OccupancyGrid g = walled(40, 40);
    AutonomousNavigator nav;
    RobotState st = pose(1.0, 1.0, 0.0);
    CHECK(nav.update(g, st).command == VelocityCommand{});
    nav.set_goal(CellIndex{30, 30});
    bool reached = false;
    for (int k = 0; k < 400 && !reached; ++k) {
        const auto r = nav.update(g, st);
        reached = r.goal_reached;
        st = world::step(g, st, r.command, 0.1);
    }
    CHECK(reached);
}

TEST_CASE("free-space distance") {
    SUBCASE("open space is Euclidean") {
        const OccupancyGrid g = walled(20, 20, 1.0);
        const FreeSpaceDistance fs(g);
        CHECK(fs.shortest({1.5, 1.5}, {17.5, 12.0}) == doctest::Approx(std::hypot(16.0, 10.5)));
    }
    SUBCASE("bends around a wall corner") {
        OccupancyGrid g = walled(20, 20, 1.0);
        for (int y = 0; y < 15; ++y) g.set({10, y}, Cell::Occupied);
        const FreeSpaceDistance fs(g);
        // Taut path touches the wall's top corners (10,15) and (11,15).
        const double expected = std::hypot(10.0 - 5.0, 15.0 - 2.0) + 1.0 + std::hypot(15.0 - 11.0, 15.0 - 2.0);
        CHECK(fs.shortest({5.0, 2.0}, {15.0, 2.0}) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("unreachable is infinite") {
        OccupancyGrid g = walled(10, 10, 1.0);
        for (int y = 0; y < 10; ++y) g.set({5, y}, Cell::Occupied);
        const FreeSpaceDistance fs(g);
        CHECK(std::isinf(fs.shortest({2.5, 2.5}, {7.5, 2.5})));
    }
    SUBCASE("bounded by Euclidean and grid path lengths") {
        Rng rng(5);
        for (int trial = 0; trial < 150; ++trial) {
            OccupancyGrid g = random_grid(rng);
            const FreeSpaceDistance fs(g);
            std::uniform_int_distribution<int> ux(0, g.width() - 1);
            std::uniform_int_distribution<int> uy(0, g.height() - 1);
            const CellIndex s{ux(rng), uy(rng)};
            const CellIndex e{ux(rng), uy(rng)};
            const auto p = plan(g, s, e);
            if (!p) continue;
            const double d = fs.shortest(g.center_of(s), g.center_of(e));
            REQUIRE(d <= p->total_length + 1e-9);
            REQUIRE(d >= world::distance(g.center_of(s), g.center_of(e)) - 1e-12);
        }
    }
}

TEST_CASE("expert profile") {
    const OccupancyGrid g = walled(80, 12);
    const CellIndex goal{70, 6};
    const Point gp = g.center_of(goal);

    const auto at_goal = expert_expected_speed(g, pose(gp.x, gp.y), goal);
    CHECK(at_goal.expected_speed == 0.0);
    CHECK(expert_expected_speed(g, pose(3.0, 1.625), std::nullopt).expected_speed == 0.0);

    const Point s = g.center_of({5, 6});
    const auto cruise = expert_expected_speed(g, pose(s.x, s.y, 0.0), goal);
    CHECK(cruise.expected_speed == doctest::Approx(1.0));
    CHECK(cruise.remaining_expert_length == doctest::Approx(world::distance(s, gp)));

    OccupancyGrid sealed = g;
    for (int y = 0; y < 12; ++y) sealed.set({40, y}, Cell::Occupied);
    CHECK_THROWS_AS(expert_expected_speed(sealed, pose(s.x, s.y), goal), UnreachableGoal);
}

TEST_CASE("expert length never exceeds a realized trajectory") {
    OccupancyGrid g = walled(60, 60);
    for (int y = 0; y < 40; ++y) g.set({30, y}, Cell::Occupied);
    for (int x = 10; x < 20; ++x) g.set({x, 45}, Cell::Occupied);
    Expert expert(g);
    Rng rng(3);
    std::uniform_int_distribution<int> cell(2, 57);
    for (int trial = 0; trial < 25; ++trial) {
        const CellIndex s{cell(rng), cell(rng)};
        const CellIndex e{cell(rng), cell(rng)};
        if (g.occupied(s) || g.occupied(e)) continue;
        RobotState st = pose(g.center_of(s).x, g.center_of(s).y, 0.0);
        const double bound = expert.evaluate(st, e).remaining_expert_length;
        AutonomousNavigator nav;
        nav.set_goal(e);
        double odometry = 0.0;
        for (int k = 0; k < 2000; ++k) {
            const auto r = nav.update(g, st);
            if (r.goal_reached) break;
            const RobotState next = world::step(g, st, r.command, 0.1);
            odometry += world::distance(st.position(), next.position());
            st = next;
        }
        const double left = world::distance(st.position(), g.center_of(e));
        CHECK(bound <= odometry + left + 1e-9);
    }
}
