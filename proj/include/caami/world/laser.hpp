#pragma once

#include <numbers>
#include <vector>

#include "caami/world/grid.hpp"
#include "caami/world/random.hpp"
#include "caami/world/types.hpp"

namespace caami::world {

struct LaserConfig {
    int beams = 72;
    double max_range = 12.0;
    double field_of_view = 2.0 * std::numbers::pi;
};

struct LaserBeam {
    double bearing = 0.0;  // robot-relative, radians
    double distance = 0.0;
};

struct LaserScan {
    double timestamp = 0.0;
    double max_range = 0.0;
    std::vector<LaserBeam> ranges;

    /// A beam at max range saw nothing.
    static bool is_return(const LaserBeam& beam, double max_range) {
        return beam.distance < max_range;
    }
};

/// Artificial sensor degradation: during [start, end) every beam is
/// independently replaced, with probability phantom_rate, by a uniformly
/// random shorter distance, producing phantom obstacles.
struct NoiseSchedule {
    double start = 0.0;
    double end = 0.0;
    double phantom_rate = 0.0;

    bool active(double t) const { return t >= start && t < end; }
    void validate() const;
};

double cast_ray(const OccupancyGrid& grid, Point origin, double angle, double max_range);

LaserScan sense(const OccupancyGrid& grid, const RobotState& state, const NoiseSchedule& noise,
                double t, Rng& rng, const LaserConfig& config = {});

}  // namespace caami::world
