#pragma once

#include <cmath>
#include <limits>

namespace caami::world {

template <typename Visitor>
void traverse_ray(const OccupancyGrid& grid, Point origin, double angle, double max_range,
                  Visitor&& visit) {
    const double res = grid.resolution();
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    constexpr double inf = std::numeric_limits<double>::infinity();

    CellIndex cell = grid.cell_of(origin);
    const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);

    // Ray parameter at which the next vertical / horizontal grid line is crossed.
    double t_max_x = inf;
    double t_max_y = inf;
    if (step_x != 0) {
        const double boundary = (cell.x + (step_x > 0 ? 1 : 0)) * res;
        t_max_x = (boundary - origin.x) / dx;
    }
    if (step_y != 0) {
        const double boundary = (cell.y + (step_y > 0 ? 1 : 0)) * res;
        t_max_y = (boundary - origin.y) / dy;
    }
    const double t_delta_x = step_x != 0 ? res / std::abs(dx) : inf;
    const double t_delta_y = step_y != 0 ? res / std::abs(dy) : inf;

    double t_enter = 0.0;
    while (t_enter <= max_range) {
        if (!visit(cell, t_enter)) {
            return;
        }
        if (!grid.in_bounds(cell)) {
            return;
        }
        if (t_max_x < t_max_y) {
            t_enter = t_max_x;
            t_max_x += t_delta_x;
            cell.x += step_x;
        } else if (t_max_y < t_max_x) {
            t_enter = t_max_y;
            t_max_y += t_delta_y;
            cell.y += step_y;
        } else {
            // Exactly through a grid vertex: step diagonally.
            t_enter = t_max_x;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
            cell.x += step_x;
            cell.y += step_y;
        }
    }
}

}  // namespace caami::world
