#pragma once

#include <limits>
#include <vector>

#include "caami/world/grid.hpp"
#include "caami/world/laser.hpp"

namespace caami::world {

struct CellChange {
    CellIndex cell;
    Cell value;
};

/// The planner's view of the arena: the prior map plus every laser return.
/// Returns that were not in the prior map revert to Free once their cell has
/// been seen through continuously for decay_seconds.
class BeliefMap {
public:
    static constexpr double no_decay = std::numeric_limits<double>::infinity();

    explicit BeliefMap(OccupancyGrid prior, double decay_seconds = 2.0);

    const OccupancyGrid& grid() const { return grid_; }
    const OccupancyGrid& prior() const { return prior_; }

    void integrate(const LaserScan& scan, const RobotState& state);

    /// Cells whose value changed since the previous call.
    std::vector<CellChange> take_changes();

private:
    void mark(CellIndex cell, Cell value);

    OccupancyGrid prior_;
    OccupancyGrid grid_;
    double decay_seconds_;
    std::vector<double> free_since_;
    std::vector<CellChange> changes_;
};

/// Cell that holds the endpoint of a beam of the given length.
CellIndex beam_endpoint_cell(const OccupancyGrid& grid, const RobotState& state,
                             const LaserBeam& beam);

}  // namespace caami::world
