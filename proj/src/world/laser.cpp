#include "caami/world/laser.hpp"

#include <stdexcept>

namespace caami::world {

void NoiseSchedule::validate() const {
    if (!(start <= end)) {
        throw std::invalid_argument("noise interval requires start <= end");
    }
    if (phantom_rate < 0.0 || phantom_rate > 1.0) {
        throw std::invalid_argument("phantom_rate must lie in [0, 1]");
    }
}

double cast_ray(const OccupancyGrid& grid, Point origin, double angle, double max_range) {
    double hit = max_range;
    traverse_ray(grid, origin, angle, max_range, [&](CellIndex cell, double t_enter) {
        if (grid.occupied(cell)) {
            hit = std::min(t_enter, max_range);
            return false;
        }
        return true;
    });
    return hit;
}

LaserScan sense(const OccupancyGrid& grid, const RobotState& state, const NoiseSchedule& noise,
                double t, Rng& rng, const LaserConfig& config) {
    LaserScan scan;
    scan.timestamp = t;
    scan.max_range = config.max_range;
    scan.ranges.reserve(static_cast<std::size_t>(config.beams));

    const bool full_circle = config.field_of_view >= 2.0 * std::numbers::pi - 1e-12;
    const double increment = full_circle ? config.field_of_view / config.beams
                                         : config.field_of_view / std::max(1, config.beams - 1);
    const double first = full_circle ? -std::numbers::pi + increment : -config.field_of_view / 2;

    const bool noisy = noise.active(t) && noise.phantom_rate > 0.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int i = 0; i < config.beams; ++i) {
        const double bearing = first + i * increment;
        double d = cast_ray(grid, state.position(), state.heading + bearing, config.max_range);
        if (noisy && unit(rng) < noise.phantom_rate) {
            d = unit(rng) * d;
        }
        scan.ranges.push_back({bearing, d});
    }
    return scan;
}

}  // namespace caami::world
