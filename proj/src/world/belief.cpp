#include "caami/world/belief.hpp"

#include <cmath>

namespace caami::world {

namespace {
constexpr double endpoint_nudge = 1e-6;
constexpr double unset = -1.0;
}  // namespace

BeliefMap::BeliefMap(OccupancyGrid prior, double decay_seconds)
    : prior_(prior), grid_(std::move(prior)), decay_seconds_(decay_seconds),
      free_since_(grid_.cell_count(), unset) {}

CellIndex beam_endpoint_cell(const OccupancyGrid& grid, const RobotState& state,
                             const LaserBeam& beam) {
    const double angle = state.heading + beam.bearing;
    const double d = beam.distance + endpoint_nudge;
    return grid.cell_of({state.x + d * std::cos(angle), state.y + d * std::sin(angle)});
}

void BeliefMap::mark(CellIndex cell, Cell value) {
    if (grid_.at(cell) != value) {
        grid_.set(cell, value);
        changes_.push_back({cell, value});
    }
}

void BeliefMap::integrate(const LaserScan& scan, const RobotState& state) {
    const double t = scan.timestamp;
    std::vector<CellIndex> endpoints;
    endpoints.reserve(scan.ranges.size());

    for (const LaserBeam& beam : scan.ranges) {
        const bool hit = LaserScan::is_return(beam, scan.max_range);
        const CellIndex end = beam_endpoint_cell(grid_, state, beam);
        if (hit && grid_.in_bounds(end)) {
            endpoints.push_back(end);
        }
        traverse_ray(grid_, state.position(), state.heading + beam.bearing, beam.distance,
                     [&](CellIndex cell, double) {
                         if (!grid_.in_bounds(cell) || (hit && cell == end)) {
                             return false;
                         }
                         if (prior_.occupied(cell) || grid_.free(cell)) {
                             return true;
                         }
                         double& since = free_since_[grid_.index(cell)];
                         if (since == unset) {
                             since = t;
                         } else if (t - since >= decay_seconds_) {
                             mark(cell, Cell::Free);
                             since = unset;
                         }
                         return true;
                     });
    }
    for (const CellIndex cell : endpoints) {
        mark(cell, Cell::Occupied);
        free_since_[grid_.index(cell)] = unset;
    }
}

std::vector<CellChange> BeliefMap::take_changes() {
    std::vector<CellChange> out;
    out.swap(changes_);
    return out;
}

}  // namespace caami::world
