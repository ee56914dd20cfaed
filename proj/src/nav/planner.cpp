#include "caami/nav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>

namespace caami::nav {

namespace {

constexpr double sqrt2 = std::numbers::sqrt2;
// Distinct step-count combinations differ in cost by far more than this.
constexpr double cost_epsilon = 1e-9;

double octile(CellIndex a, CellIndex b) {
    const int dx = std::abs(a.x - b.x);
    const int dy = std::abs(a.y - b.y);
    return (dx + dy) + (sqrt2 - 2.0) * std::min(dx, dy);
}

struct OpenEntry {
    double f;
    std::uint64_t seq;
    std::size_t index;

    bool operator>(const OpenEntry& o) const {
        if (f != o.f) return f > o.f;
        return seq > o.seq;
    }
};

}  // namespace

double path_length(int straight_steps, int diagonal_steps, double resolution) {
    return resolution * (static_cast<double>(straight_steps) +
                         sqrt2 * static_cast<double>(diagonal_steps));
}

bool move_allowed(const OccupancyGrid& grid, CellIndex from, Move m) {
    const CellIndex to{from.x + m.dx, from.y + m.dy};
    if (grid.occupied(to)) {
        return false;
    }
    if (m.dx != 0 && m.dy != 0) {
        return grid.free({from.x + m.dx, from.y}) && grid.free({from.x, from.y + m.dy});
    }
    return true;
}

std::optional<Path> plan(const OccupancyGrid& grid, CellIndex start, CellIndex goal) {
    if (grid.occupied(start) || grid.occupied(goal)) {
        return std::nullopt;
    }
    const std::size_t n = grid.cell_count();
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::vector<double> g(n, inf);
    std::vector<std::size_t> parent(n, none);
    std::vector<std::uint8_t> closed(n, 0);
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
    std::uint64_t seq = 0;

    const std::size_t start_i = grid.index(start);
    const std::size_t goal_i = grid.index(goal);
    g[start_i] = 0.0;
    open.push({octile(start, goal), seq++, start_i});

    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        if (closed[top.index]) {
            continue;
        }
        closed[top.index] = 1;
        if (top.index == goal_i) {
            break;
        }
        const CellIndex cell = grid.cell_at_index(top.index);
        for (const Move m : moves) {
            if (!move_allowed(grid, cell, m)) {
                continue;
            }
            const CellIndex next{cell.x + m.dx, cell.y + m.dy};
            const std::size_t ni = grid.index(next);
            if (closed[ni]) {
                continue;
            }
            const double step = (m.dx != 0 && m.dy != 0) ? sqrt2 : 1.0;
            const double candidate = g[top.index] + step;
            if (candidate < g[ni] - cost_epsilon) {
                g[ni] = candidate;
                parent[ni] = top.index;
                open.push({candidate + octile(next, goal), seq++, ni});
            }
        }
    }

    if (!closed[goal_i]) {
        return std::nullopt;
    }
    Path path;
    for (std::size_t i = goal_i; i != none; i = parent[i]) {
        path.waypoints.push_back(grid.cell_at_index(i));
    }
    std::reverse(path.waypoints.begin(), path.waypoints.end());
    for (std::size_t k = 1; k < path.waypoints.size(); ++k) {
        const auto& a = path.waypoints[k - 1];
        const auto& b = path.waypoints[k];
        if (a.x != b.x && a.y != b.y) {
            ++path.diagonal_steps;
        } else {
            ++path.straight_steps;
        }
    }
    path.total_length = path_length(path.straight_steps, path.diagonal_steps, grid.resolution());
    return path;
}

}  // namespace caami::nav
