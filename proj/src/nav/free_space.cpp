#include "caami/nav/free_space.hpp"

#include <limits>

namespace caami::nav {

using world::CellIndex;
using world::Point;

FreeSpaceDistance::FreeSpaceDistance(world::OccupancyGrid grid) : grid_(std::move(grid)) {
    const double res = grid_.resolution();
    for (int j = 0; j <= grid_.height(); ++j) {
        for (int i = 0; i <= grid_.width(); ++i) {
            const bool sw = grid_.occupied({i - 1, j - 1});
            const bool se = grid_.occupied({i, j - 1});
            const bool nw = grid_.occupied({i - 1, j});
            const bool ne = grid_.occupied({i, j});
            const int count = sw + se + nw + ne;
            // Convex obstacle corners and diagonal pinch points are the only
            // places a taut path can bend.
            const bool pinch = count == 2 && sw == ne;
            if (count == 1 || pinch) {
                vertices_.push_back({i * res, j * res});
            }
        }
    }
    edges_.resize(vertices_.size());
    for (std::size_t a = 0; a < vertices_.size(); ++a) {
        for (std::size_t b = a + 1; b < vertices_.size(); ++b) {
            if (world::segment_clear(grid_, vertices_[a], vertices_[b])) {
                const double d = world::distance(vertices_[a], vertices_[b]);
                edges_[a].push_back({b, d});
                edges_[b].push_back({a, d});
            }
        }
    }
}

double FreeSpaceDistance::shortest(Point from, Point to) const {
    if (world::segment_clear(grid_, from, to)) {
        return world::distance(from, to);
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = vertices_.size();
    std::vector<double> dist(n, inf);
    std::vector<double> to_target(n, inf);
    std::vector<bool> done(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        if (world::segment_clear(grid_, from, vertices_[v])) {
            dist[v] = world::distance(from, vertices_[v]);
        }
        if (world::segment_clear(grid_, vertices_[v], to)) {
            to_target[v] = world::distance(vertices_[v], to);
        }
    }
    double best = inf;
    // Dense Dijkstra; the vertex set is small.
    for (;;) {
        std::size_t u = n;
        for (std::size_t v = 0; v < n; ++v) {
            if (!done[v] && dist[v] < inf && (u == n || dist[v] < dist[u])) {
                u = v;
            }
        }
        if (u == n || dist[u] >= best) {
            break;
        }
        done[u] = true;
        best = std::min(best, dist[u] + to_target[u]);
        for (const auto& [v, w] : edges_[u]) {
            if (!done[v] && dist[u] + w < dist[v]) {
                dist[v] = dist[u] + w;
            }
        }
    }
    return best;
}

}  // namespace caami::nav
