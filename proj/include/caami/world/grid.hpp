#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "caami/world/types.hpp"

namespace caami::world {

enum class Cell : std::uint8_t { Free, Occupied };

/// Row-major occupancy grid. Cell (x, y) covers the square
/// [x*res, (x+1)*res) x [y*res, (y+1)*res) in world meters, y pointing up.
/// Anything outside the grid reads as Occupied.
class OccupancyGrid {
public:
    OccupancyGrid() = default;
    OccupancyGrid(int width_cells, int height_cells, double resolution, Cell fill = Cell::Free);

    int width() const { return width_; }
    int height() const { return height_; }
    double resolution() const { return resolution_; }
    double width_m() const { return width_ * resolution_; }
    double height_m() const { return height_ * resolution_; }
    std::size_t cell_count() const { return cells_.size(); }

    bool in_bounds(CellIndex c) const {
        return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
    }
    Cell at(CellIndex c) const;
    void set(CellIndex c, Cell value);
    bool occupied(CellIndex c) const { return !in_bounds(c) || at(c) == Cell::Occupied; }
    bool free(CellIndex c) const { return !occupied(c); }

    CellIndex cell_of(Point p) const;
    Point center_of(CellIndex c) const;

    std::size_t occupied_count() const;
    void fill_border();
    bool border_occupied() const;

    std::size_t index(CellIndex c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x);
    }
    CellIndex cell_at_index(std::size_t i) const {
        return {static_cast<int>(i % static_cast<std::size_t>(width_)),
                static_cast<int>(i / static_cast<std::size_t>(width_))};
    }

    friend bool operator==(const OccupancyGrid&, const OccupancyGrid&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    double resolution_ = 0.25;
    std::vector<Cell> cells_;
};

/// True when the closed segment a-b stays out of the interior of every
/// Occupied cell. Touching cell edges or corners is allowed.
bool segment_clear(const OccupancyGrid& grid, Point a, Point b);

/// Visits the cells pierced by a ray, in order, until the visitor returns
/// false or max_range is exceeded. The visitor receives the cell and the
/// ray parameter (meters) at which the ray enters it.
template <typename Visitor>
void traverse_ray(const OccupancyGrid& grid, Point origin, double angle, double max_range,
                  Visitor&& visit);

}  // namespace caami::world

#include "caami/world/grid_traverse.ipp"
