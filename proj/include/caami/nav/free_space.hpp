#pragma once

#include <vector>

#include "caami/world/grid.hpp"

namespace caami::nav {

/// Exact Euclidean shortest-path length for a point moving through the
/// closed union of Free cells. Built on a visibility graph over the reflex
/// corners of the free region; no robot trajectory that stays out of
/// occupied interiors can be shorter.
class FreeSpaceDistance {
public:
    explicit FreeSpaceDistance(world::OccupancyGrid grid);

    /// Infinity when `to` cannot be reached.
    double shortest(world::Point from, world::Point to) const;

    std::size_t vertex_count() const { return vertices_.size(); }
    const world::OccupancyGrid& grid() const { return grid_; }

private:
    world::OccupancyGrid grid_;
    std::vector<world::Point> vertices_;
    std::vector<std::vector<std::pair<std::size_t, double>>> edges_;
};

}  // namespace caami::nav
