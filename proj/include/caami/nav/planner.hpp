#pragma once

#include <optional>
#include <vector>

#include "caami/world/grid.hpp"

namespace caami::nav {

using world::CellIndex;
using world::OccupancyGrid;

struct Path {
    std::vector<CellIndex> waypoints;
    double total_length = 0.0;  // meters
    int straight_steps = 0;
    int diagonal_steps = 0;

    bool empty() const { return waypoints.empty(); }
    const CellIndex& goal() const { return waypoints.back(); }

    friend bool operator==(const Path&, const Path&) = default;
};

/// Length of a path with the given step counts. Computed the same way for
/// every path so equal-cost paths compare bitwise equal.
double path_length(int straight_steps, int diagonal_steps, double resolution);

/// 8-connected moves in expansion order E, NE, N, NW, W, SW, S, SE. A
/// diagonal move is only allowed when both orthogonal neighbours are Free,
/// so the cell-center polyline never clips an occupied corner.
struct Move {
    int dx;
    int dy;
};
inline constexpr Move moves[8] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1},
                                  {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
bool move_allowed(const OccupancyGrid& grid, CellIndex from, Move m);

/// Cost-optimal A* with the octile heuristic. Returns nullopt when the goal
/// is unreachable or either endpoint is not Free.
std::optional<Path> plan(const OccupancyGrid& grid, CellIndex start, CellIndex goal);

}  // namespace caami::nav
