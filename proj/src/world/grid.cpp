#include "caami/world/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace caami::world {

std::string_view to_string(LoaMode mode) {
    return mode == LoaMode::Teleoperation ? "teleoperation" : "autonomy";
}

std::optional<LoaMode> parse_loa(std::string_view text) {
    if (text == "teleoperation" || text == "teleop") {
        return LoaMode::Teleoperation;
    }
    if (text == "autonomy") {
        return LoaMode::Autonomy;
    }
    return std::nullopt;
}

double wrap_angle(double radians) {
    double wrapped = std::remainder(radians, 2.0 * std::numbers::pi);
    if (wrapped <= -std::numbers::pi) {
        wrapped += 2.0 * std::numbers::pi;
    }
    return wrapped;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

OccupancyGrid::OccupancyGrid(int width_cells, int height_cells, double resolution, Cell fill)
    : width_(width_cells), height_(height_cells), resolution_(resolution) {
    if (width_cells <= 0 || height_cells <= 0) {
        throw std::invalid_argument("grid dimensions must be positive");
    }
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("grid resolution must be positive");
    }
    cells_.assign(static_cast<std::size_t>(width_cells) * static_cast<std::size_t>(height_cells),
                  fill);
}

Cell OccupancyGrid::at(CellIndex c) const {
    if (!in_bounds(c)) {
        return Cell::Occupied;
    }
    return cells_[index(c)];
}

void OccupancyGrid::set(CellIndex c, Cell value) {
    if (!in_bounds(c)) {
        throw std::out_of_range("cell outside grid");
    }
    cells_[index(c)] = value;
}

CellIndex OccupancyGrid::cell_of(Point p) const {
    return {static_cast<int>(std::floor(p.x / resolution_)),
            static_cast<int>(std::floor(p.y / resolution_))};
}

Point OccupancyGrid::center_of(CellIndex c) const {
    return {(c.x + 0.5) * resolution_, (c.y + 0.5) * resolution_};
}

std::size_t OccupancyGrid::occupied_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), Cell::Occupied));
}

void OccupancyGrid::fill_border() {
    for (int x = 0; x < width_; ++x) {
        set({x, 0}, Cell::Occupied);
        set({x, height_ - 1}, Cell::Occupied);
    }
    for (int y = 0; y < height_; ++y) {
        set({0, y}, Cell::Occupied);
        set({width_ - 1, y}, Cell::Occupied);
    }
}

bool OccupancyGrid::border_occupied() const {
    for (int x = 0; x < width_; ++x) {
        if (!occupied({x, 0}) || !occupied({x, height_ - 1})) {
            return false;
        }
    }
    for (int y = 0; y < height_; ++y) {
        if (!occupied({0, y}) || !occupied({width_ - 1, y})) {
            return false;
        }
    }
    return true;
}

namespace {

bool point_in_occupied_interior(const OccupancyGrid& grid, Point p) {
    const double res = grid.resolution();
    const double fx = p.x / res;
    const double fy = p.y / res;
    // On a grid line the point is on a cell boundary, never in an interior.
    if (fx == std::floor(fx) || fy == std::floor(fy)) {
        return false;
    }
    return grid.occupied(grid.cell_of(p));
}

}  // namespace

bool segment_clear(const OccupancyGrid& grid, Point a, Point b) {
    if (a == b) {
        return !point_in_occupied_interior(grid, a);
    }
    const double res = grid.resolution();
    if (a.x > b.x) {
        std::swap(a, b);
    }
    const double xmin = a.x;
    const double xmax = b.x;

    if (xmin == xmax) {
        const double fx = xmin / res;
        const bool on_boundary = fx == std::floor(fx);
        const int col = static_cast<int>(std::floor(fx));
        const double ylo = std::min(a.y, b.y);
        const double yhi = std::max(a.y, b.y);
        const int r0 = static_cast<int>(std::floor(ylo / res));
        const int r1 = static_cast<int>(std::ceil(yhi / res)) - 1;
        for (int r = r0; r <= r1; ++r) {
            // A run along a column boundary is only blocked between two walls.
            if (grid.occupied({col, r}) && (!on_boundary || grid.occupied({col - 1, r}))) {
                return false;
            }
        }
        return true;
    }

    const double slope = (b.y - a.y) / (b.x - a.x);
    const int c0 = static_cast<int>(std::floor(xmin / res));
    const int c1 = static_cast<int>(std::floor(xmax / res));
    for (int c = c0; c <= c1; ++c) {
        const double x0 = std::max(xmin, c * res);
        const double x1 = std::min(xmax, (c + 1) * res);
        if (!(x1 > x0)) {
            continue;  // touches the column only at its boundary line
        }
        const double y0 = a.y + slope * (x0 - a.x);
        const double y1 = a.y + slope * (x1 - a.x);
        const double ylo = std::min(y0, y1);
        const double yhi = std::max(y0, y1);
        if (ylo == yhi) {
            const double fy = ylo / res;
            if (fy == std::floor(fy)) {
                const int row = static_cast<int>(fy);
                if (grid.occupied({c, row}) && grid.occupied({c, row - 1})) {
                    return false;
                }
                continue;
            }
            if (grid.occupied({c, static_cast<int>(std::floor(fy))})) {
                return false;
            }
            continue;
        }
        const int r0 = static_cast<int>(std::floor(ylo / res));
        const int r1 = static_cast<int>(std::ceil(yhi / res)) - 1;
        for (int r = r0; r <= r1; ++r) {
            if (grid.occupied({c, r})) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace caami::world
