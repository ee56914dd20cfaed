#include "caami/nav/follower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace caami::nav {

namespace {

struct Projection {
    std::size_t segment = 0;
    double arc = 0.0;  // arc length from path start to the projected point
    Point point;
};

Point lerp(Point a, Point b, double s) { return {a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)}; }

Projection project(const std::vector<Point>& pts, const std::vector<double>& cumulative,
                   Point p) {
    Projection best{0, 0.0, pts.front()};
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Point a = pts[i];
        const Point b = pts[i + 1];
        const double vx = b.x - a.x;
        const double vy = b.y - a.y;
        const double len2 = vx * vx + vy * vy;
        double s = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        const Point q = lerp(a, b, s);
        const double d = world::distance(p, q);
        if (d < best_d) {
            best_d = d;
            best = {i, cumulative[i] + s * (cumulative[i + 1] - cumulative[i]), q};
        }
    }
    return best;
}

Point point_at(const std::vector<Point>& pts, const std::vector<double>& cumulative, double arc) {
    if (arc <= 0.0) {
        return pts.front();
    }
    if (arc >= cumulative.back()) {
        return pts.back();
    }
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), arc);
    const std::size_t i = static_cast<std::size_t>(it - cumulative.begin()) - 1;
    const double seg = cumulative[i + 1] - cumulative[i];
    return lerp(pts[i], pts[i + 1], seg > 0.0 ? (arc - cumulative[i]) / seg : 0.0);
}

}  // namespace

CellIndex robot_cell(const OccupancyGrid& grid, Point p) {
    const CellIndex base = grid.cell_of(p);
    if (grid.free(base)) {
        return base;
    }
    const double res = grid.resolution();
    const bool on_x = p.x == base.x * res;
    const bool on_y = p.y == base.y * res;
    for (const CellIndex c : {CellIndex{base.x - (on_x ? 1 : 0), base.y},
                              CellIndex{base.x, base.y - (on_y ? 1 : 0)},
                              CellIndex{base.x - (on_x ? 1 : 0), base.y - (on_y ? 1 : 0)}}) {
        if (grid.free(c)) {
            return c;
        }
    }
    return base;
}

FollowResult follow(const OccupancyGrid& grid, const Path& path, const RobotState& state,
                    const FollowerParams& params) {
    FollowResult result;
    if (path.empty()) {
        return result;
    }
    std::vector<Point> pts;
    pts.reserve(path.waypoints.size());
    for (const CellIndex& c : path.waypoints) {
        pts.push_back(grid.center_of(c));
    }
    std::vector<double> cumulative(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        cumulative[i] = cumulative[i - 1] + world::distance(pts[i - 1], pts[i]);
    }

    const Point p = state.position();
    const Point goal = pts.back();
    const Projection proj = project(pts, cumulative, p);
    result.remaining = (cumulative.back() - proj.arc) + world::distance(p, proj.point);

    if (world::distance(p, goal) <= params.goal_tolerance) {
        result.goal_reached = true;
        result.remaining = 0.0;
        return result;
    }

    double target_arc = proj.arc + params.lookahead;
    Point target = point_at(pts, cumulative, target_arc);
    if (params.line_of_sight) {
        const double back_step = grid.resolution() / 2.0;
        while (target_arc > proj.arc && !world::segment_clear(grid, p, target)) {
            target_arc = std::max(proj.arc, target_arc - back_step);
            target = point_at(pts, cumulative, target_arc);
        }
    }

    const double dx = target.x - p.x;
    const double dy = target.y - p.y;
    const double heading_error =
        (dx == 0.0 && dy == 0.0) ? 0.0 : world::wrap_angle(std::atan2(dy, dx) - state.heading);

    const double ramp = std::min(1.0, result.remaining / params.decel_radius);
    const double v_max = params.limits.max_linear;
    result.command.linear = v_max * std::max(0.0, std::cos(heading_error)) * ramp;
    result.command.angular = std::clamp(params.turn_gain * heading_error,
                                        -params.limits.max_angular, params.limits.max_angular);
    return result;
}

}  // namespace caami::nav
