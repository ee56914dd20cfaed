#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "caami/world/grid.hpp"

namespace caami::world {

class MapFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ArenaMap {
    OccupancyGrid grid;
    std::map<char, CellIndex> waypoints;
};

/// Plain-text arena format: '#' Occupied, '.' Free, 'A'-'Z' waypoint labels
/// on Free cells, one row per line. The first line is the top row (largest y).
ArenaMap parse_arena(std::istream& in, double resolution = 0.25);
ArenaMap parse_arena(const std::vector<std::string>& rows, double resolution = 0.25);
ArenaMap load_arena(const std::filesystem::path& path, double resolution = 0.25);

std::vector<std::string> format_arena(const ArenaMap& map);

}  // namespace caami::world
