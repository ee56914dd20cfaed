#include <cmath>
#include <complex>
#include <set>
#include <sstream>

#include "doctest.h"

#include "caami/world/belief.hpp"
#include "caami/world/kinematics.hpp"
#include "caami/world/laser.hpp"
#include "caami/world/map_io.hpp"

using namespace caami;
using namespace caami::world;

namespace {

OccupancyGrid open_arena(int w, int h, double res = 0.25) {
    OccupancyGrid g(w, h, res);
    g.fill_border();
    return g;
}

RobotState at(double x, double y, double heading = 0.0) {
    RobotState s;
    s.x = x;
    s.y = y;
    s.heading = heading;
    return s;
}

}  // namespace

TEST_CASE("map text format") {
    const std::vector<std::string> rows = {
        "#####",
        "#A..#",
        "#.#B#",
        "#####",
    };
    const ArenaMap map = parse_arena(rows, 0.5);
    CHECK(map.grid.width() == 5);
    CHECK(map.grid.height() == 4);
    CHECK(map.grid.cell_count() == 20);
    // First line is the top row.
    CHECK(map.waypoints.at('A') == CellIndex{1, 2});
    CHECK(map.waypoints.at('B') == CellIndex{3, 1});
    CHECK(map.grid.occupied({2, 1}));
    CHECK(map.grid.free({1, 1}));
    CHECK(format_arena(map) == rows);

    CHECK_THROWS_AS(parse_arena(std::vector<std::string>{"###", "#.", "###"}), MapFormatError);
    CHECK_THROWS_AS(parse_arena(std::vector<std::string>{"###", "#x#", "###"}), MapFormatError);
    CHECK_THROWS_AS(parse_arena(std::vector<std::string>{"####", "#AA#", "####"}),
                    MapFormatError);
    CHECK_THROWS_AS(parse_arena(std::vector<std::string>{"###", "...", "###"}), MapFormatError);

    std::istringstream in("###\r\n#.#\r\n###\r\n");
    CHECK(parse_arena(in).grid.free({1, 1}));
}

TEST_CASE("bundled arena is 24 m square with closed border") {
    const ArenaMap map = load_arena(CAAMI_SOURCE_DIR "/maps/arena.txt");
    CHECK(map.grid.width() == 96);
    CHECK(map.grid.height() == 96);
    CHECK(map.grid.width_m() == doctest::Approx(24.0));
    CHECK(map.grid.border_occupied());
    CHECK(map.waypoints.count('S') == 1);
}

TEST_CASE("segment_clear treats cell boundaries as free") {
    OccupancyGrid g(4, 4, 1.0);
    g.set({1, 1}, Cell::Occupied);
    CHECK(segment_clear(g, {0.5, 0.5}, {3.5, 0.5}));
    CHECK_FALSE(segment_clear(g, {0.5, 1.5}, {3.5, 1.5}));
    // Along the top edge of the occupied cell.
    CHECK(segment_clear(g, {0.5, 2.0}, {3.5, 2.0}));
    // Touching only the corner.
    CHECK(segment_clear(g, {0.0, 0.0}, {1.0, 1.0}));
    CHECK(segment_clear(g, {2.5, 0.5}, {0.5, 2.5}) == false);
    CHECK(segment_clear(g, {2.0, 0.0}, {0.0, 2.0}));
    CHECK_FALSE(segment_clear(g, {3.0, 0.0}, {0.0, 3.0}));
    // Vertical through the occupied column.
    CHECK_FALSE(segment_clear(g, {1.5, 0.5}, {1.5, 3.5}));
    CHECK(segment_clear(g, {1.0, 0.5}, {1.0, 3.5}));
    CHECK_FALSE(segment_clear(g, {1.5, 1.5}, {1.5, 1.5}));

    OccupancyGrid wall(6, 6, 1.0);
    for (int y = 0; y < 6; ++y) {
        wall.set({2, y}, Cell::Occupied);
        wall.set({3, y}, Cell::Occupied);
    }
    // A seam between two occupied cells is inside the obstacle.
    CHECK_FALSE(segment_clear(wall, {0.5, 2.0}, {5.5, 2.0}));
    CHECK_FALSE(segment_clear(wall, {3.0, 0.5}, {3.0, 4.5}));
    CHECK(segment_clear(wall, {2.0, 0.5}, {2.0, 4.5}));
}

TEST_CASE("step: zero command leaves the state unchanged") {
    const auto grid = open_arena(20, 20);
    RobotState s = at(2.0, 2.0, 0.7);
    for (double dt : {0.01, 0.1, 1.0}) {
        const RobotState n = step(grid, s, {0.0, 0.0}, dt);
        CHECK(n.x == s.x);
        CHECK(n.y == s.y);
        CHECK(n.heading == s.heading);
        CHECK_FALSE(n.collided);
    }
}

TEST_CASE("step: straight line advances exactly v*dt") {
    const auto grid = open_arena(20, 20);
    const RobotState n = step(grid, at(2.0, 2.0, 0.0), {1.0, 0.0}, 0.1);
    CHECK(n.x == doctest::Approx(2.1).epsilon(1e-15));
    CHECK(n.y == 2.0);
    CHECK(n.linear_speed == 1.0);
}

TEST_CASE("step: constant turn traces the closed-form chord polygon") {
    const auto grid = open_arena(40, 40);
    const double v = 1.0;
    const double w = std::numbers::pi;
    const double dt = 0.1;
    const double theta = w * dt;
    RobotState s = at(5.0, 5.0, 0.3);
    const std::complex<double> p0(s.x, s.y);
    const std::complex<double> e0 = std::polar(1.0, s.heading);
    const std::complex<double> q = std::polar(1.0, theta);
    // Sum of the unit steps exp(i(h0 + j*theta)), j = 1..k, as a geometric series.
    const std::complex<double> center = p0 + v * dt * e0 * q / (1.0 - q);
    const double radius = v * dt / (2.0 * std::sin(theta / 2.0));

    for (int k = 1; k <= 20; ++k) {
        s = step(grid, s, {v, w}, dt);
        const std::complex<double> expected =
            p0 + v * dt * e0 * q * (1.0 - std::pow(q, k)) / (1.0 - q);
        CHECK(std::abs(std::complex<double>(s.x, s.y) - expected) < 1e-9);
        CHECK(std::abs(std::abs(std::complex<double>(s.x, s.y) - center) - radius) < 1e-9);
    }
    // 20 steps of pi/10 close the loop.
    CHECK(std::hypot(s.x - 5.0, s.y - 5.0) < 1e-6);
    // The chord polygon's circumradius converges on v/w.
    CHECK(radius / (v / w) == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("step: clamps commands and blocks motion into walls") {
    const auto grid = open_arena(8, 8, 1.0);
    RobotState s = at(1.5, 1.5, 0.0);
    RobotState n = step(grid, s, {5.0, 10.0}, 0.1);
    CHECK(n.linear_speed == 1.0);
    CHECK(n.angular_speed == doctest::Approx(std::numbers::pi));

    s = at(6.95, 3.5, 0.0);
    n = step(grid, s, {1.0, 0.0}, 0.1);
    CHECK(n.collided);
    CHECK(n.linear_speed == 0.0);
    CHECK(n.x == s.x);
    CHECK(n.y == s.y);
}

TEST_CASE("step: robot center never enters an occupied cell") {
    Rng rng(7);
    OccupancyGrid grid = open_arena(24, 24, 0.5);
    std::uniform_int_distribution<int> cell(1, 22);
    for (int i = 0; i < 60; ++i) {
        grid.set({cell(rng), cell(rng)}, Cell::Occupied);
    }
    grid.set({12, 12}, Cell::Free);
    RobotState s = at(6.25, 6.25, 0.0);
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    std::uniform_real_distribution<double> w(-4.0, 4.0);
    int collisions = 0;
    for (int k = 0; k < 5000; ++k) {
        s = step(grid, s, {v(rng), w(rng)}, 0.1);
        collisions += s.collided ? 1 : 0;
        const CellIndex c = grid.cell_of(s.position());
        const bool on_boundary = std::fmod(s.x, 0.5) == 0.0 || std::fmod(s.y, 0.5) == 0.0;
        REQUIRE((grid.free(c) || on_boundary));
        REQUIRE(std::abs(s.heading) <= std::numbers::pi);
    }
    CHECK(collisions > 0);
}

TEST_CASE("sense: noise-free ranges match wall geometry") {
    const double res = 0.25;
    const auto grid = open_arena(10, 10, res);
    const RobotState s = at(1.25, 1.25, 0.4);
    Rng rng(1);
    const LaserScan scan = sense(grid, s, {}, 0.0, rng);
    REQUIRE(scan.ranges.size() == 72);
    // Interior free box is [0.25, 2.25]^2.
    for (const LaserBeam& beam : scan.ranges) {
        const double a = s.heading + beam.bearing;
        const double c = std::cos(a);
        const double sn = std::sin(a);
        double t = std::numeric_limits<double>::infinity();
        if (c > 1e-12) t = std::min(t, (2.25 - s.x) / c);
        if (c < -1e-12) t = std::min(t, (0.25 - s.x) / c);
        if (sn > 1e-12) t = std::min(t, (2.25 - s.y) / sn);
        if (sn < -1e-12) t = std::min(t, (0.25 - s.y) / sn);
        CHECK(beam.distance == doctest::Approx(t).epsilon(1e-9));
        CHECK(beam.distance >= 0.0);
        CHECK(beam.distance <= scan.max_range);
    }
}

TEST_CASE("sense: degenerate and inactive noise equal the clean scan") {
    const auto grid = open_arena(40, 40);
    const RobotState s = at(4.0, 5.0, -1.0);
    Rng clean_rng(3);
    const LaserScan clean = sense(grid, s, {}, 1.0, clean_rng);

    Rng rng(3);
    const LaserScan zero_rate = sense(grid, s, {0.0, 10.0, 0.0}, 1.0, rng);
    const LaserScan outside = sense(grid, s, {5.0, 10.0, 0.9}, 1.0, rng);
    for (std::size_t i = 0; i < clean.ranges.size(); ++i) {
        CHECK(zero_rate.ranges[i].distance == clean.ranges[i].distance);
        CHECK(outside.ranges[i].distance == clean.ranges[i].distance);
    }
    // Outside the active interval no randomness is consumed.
    CHECK(rng == Rng(3));
}

TEST_CASE("sense: phantom frequency matches the configured rate") {
    const auto grid = open_arena(96, 96);
    const RobotState s = at(12.0, 12.0, 0.0);
    Rng clean_rng(0);
    const LaserScan clean = sense(grid, s, {}, 0.0, clean_rng);
    Rng rng(2024);
    const NoiseSchedule noise{0.0, 1000.0, 0.3};
    std::size_t shortened = 0;
    std::size_t total = 0;
    for (int k = 0; k < 1000; ++k) {
        const LaserScan scan = sense(grid, s, noise, k * 0.1, rng);
        for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
            shortened += scan.ranges[i].distance < clean.ranges[i].distance ? 1 : 0;
            ++total;
        }
    }
    CHECK(total == 72000);
    const double fraction = static_cast<double>(shortened) / static_cast<double>(total);
    CHECK(fraction == doctest::Approx(0.30).epsilon(0.02 / 0.30));
}

TEST_CASE("sense: identical seeds give identical scans") {
    const auto grid = open_arena(40, 40);
    const RobotState s = at(4.0, 5.0, 2.0);
    const NoiseSchedule noise{0.0, 5.0, 0.5};
    Rng a(99);
    Rng b(99);
    for (int k = 0; k < 20; ++k) {
        const auto sa = sense(grid, s, noise, k * 0.1, a);
        const auto sb = sense(grid, s, noise, k * 0.1, b);
        for (std::size_t i = 0; i < sa.ranges.size(); ++i) {
            REQUIRE(sa.ranges[i].distance == sb.ranges[i].distance);
        }
    }
}

TEST_CASE("belief: empty scan changes nothing") {
    const auto grid = open_arena(20, 20);
    BeliefMap belief(grid);
    LaserScan scan;
    scan.max_range = 12.0;
    belief.integrate(scan, at(2.0, 2.0));
    CHECK(belief.grid() == grid);
    CHECK(belief.take_changes().empty());
}

TEST_CASE("belief: a single phantom return marks exactly the cell ahead") {
    const auto grid = open_arena(40, 40);
    BeliefMap belief(grid);
    const RobotState s = at(3.125, 5.125, 0.0);
    LaserScan scan;
    scan.max_range = 12.0;
    scan.ranges.push_back({0.0, 2.0});
    belief.integrate(scan, s);
    CHECK(belief.grid().occupied_count() == grid.occupied_count() + 1);
    CHECK(belief.grid().occupied(grid.cell_of({5.125, 5.125})));
    CHECK(grid.free(grid.cell_of({5.125, 5.125})));
    const auto changes = belief.take_changes();
    REQUIRE(changes.size() == 1);
    CHECK(changes[0].cell == CellIndex{20, 20});
}

TEST_CASE("belief: noisy episode matches an independent endpoint rasterizer") {
    const auto grid = open_arena(48, 48);
    BeliefMap belief(grid, BeliefMap::no_decay);
    Rng rng(5);
    const NoiseSchedule noise{0.0, 100.0, 0.25};
    std::set<std::pair<int, int>> oracle;
    for (int y = 0; y < grid.height(); ++y) {
        for (int x = 0; x < grid.width(); ++x) {
            if (grid.occupied({x, y})) oracle.insert({x, y});
        }
    }
    RobotState s = at(6.0, 6.0, 0.0);
    for (int k = 0; k < 200; ++k) {
        s.x = 3.0 + 0.03 * k;
        s.heading = 0.05 * k;
        const LaserScan scan = sense(grid, s, noise, k * 0.1, rng);
        belief.integrate(scan, s);
        for (const auto& beam : scan.ranges) {
            if (beam.distance >= scan.max_range) continue;
            // Endpoint nudged just past the range so wall hits land inside the wall.
            const double d = beam.distance + 1e-6;
            const double a = s.heading + beam.bearing;
            const double px = s.x + d * std::cos(a);
            const double py = s.y + d * std::sin(a);
            oracle.insert({static_cast<int>(std::floor(px / 0.25)),
                           static_cast<int>(std::floor(py / 0.25))});
        }
    }
    CHECK(belief.grid().occupied_count() == oracle.size());
    CHECK(grid == open_arena(48, 48));
}

TEST_CASE("belief: phantoms decay after two seconds of free observations") {
    const auto grid = open_arena(40, 40);
    BeliefMap belief(grid, 2.0);
    const RobotState s = at(3.125, 5.125, 0.0);
    LaserScan phantom;
    phantom.max_range = 12.0;
    phantom.ranges.push_back({0.0, 2.0});
    belief.integrate(phantom, s);
    const CellIndex cell{20, 20};
    REQUIRE(belief.grid().occupied(cell));

    LaserScan clear;
    clear.max_range = 12.0;
    clear.ranges.push_back({0.0, 12.0});
    for (int k = 1; k <= 20; ++k) {
        clear.timestamp = 0.1 * k;
        belief.integrate(clear, s);
        CHECK(belief.grid().occupied(cell));
    }
    clear.timestamp = 2.1 + 1e-9;
    belief.integrate(clear, s);
    CHECK(belief.grid().free(cell));
    // Prior walls never decay.
    CHECK(belief.grid().occupied_count() == grid.occupied_count());
}
