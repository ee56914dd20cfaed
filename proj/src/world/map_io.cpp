#include "caami/world/map_io.hpp"

#include <fstream>
#include <istream>

namespace caami::world {

ArenaMap parse_arena(const std::vector<std::string>& raw_rows, double resolution) {
    std::vector<std::string> rows;
    for (std::string row : raw_rows) {
        if (!row.empty() && row.back() == '\r') {
            row.pop_back();
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    if (rows.empty()) {
        throw MapFormatError("map has no rows");
    }
    const auto width = rows.front().size();
    const int height = static_cast<int>(rows.size());

    ArenaMap map{OccupancyGrid(static_cast<int>(width), height, resolution), {}};
    for (int line = 0; line < height; ++line) {
        const std::string& row = rows[static_cast<std::size_t>(line)];
        if (row.size() != width) {
            throw MapFormatError("row " + std::to_string(line + 1) + " has length " +
                                 std::to_string(row.size()) + ", expected " +
                                 std::to_string(width));
        }
        const int y = height - 1 - line;
        for (std::size_t col = 0; col < width; ++col) {
            const char ch = row[col];
            const CellIndex cell{static_cast<int>(col), y};
            if (ch == '#') {
                map.grid.set(cell, Cell::Occupied);
            } else if (ch == '.') {
                map.grid.set(cell, Cell::Free);
            } else if (ch >= 'A' && ch <= 'Z') {
                if (!map.waypoints.emplace(ch, cell).second) {
                    throw MapFormatError(std::string("duplicate waypoint label '") + ch + "'");
                }
                map.grid.set(cell, Cell::Free);
            } else {
                throw MapFormatError(std::string("unexpected character '") + ch + "' on row " +
                                     std::to_string(line + 1));
            }
        }
    }
    if (!map.grid.border_occupied()) {
        throw MapFormatError("arena border must be fully Occupied");
    }
    return map;
}

ArenaMap parse_arena(std::istream& in, double resolution) {
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) {
        rows.push_back(line);
    }
    return parse_arena(rows, resolution);
}

ArenaMap load_arena(const std::filesystem::path& path, double resolution) {
    std::ifstream in(path);
    if (!in) {
        throw MapFormatError("cannot open map file " + path.string());
    }
    return parse_arena(in, resolution);
}

std::vector<std::string> format_arena(const ArenaMap& map) {
    const auto& grid = map.grid;
    std::vector<std::string> rows(static_cast<std::size_t>(grid.height()),
                                  std::string(static_cast<std::size_t>(grid.width()), '.'));
    for (int y = 0; y < grid.height(); ++y) {
        auto& row = rows[static_cast<std::size_t>(grid.height() - 1 - y)];
        for (int x = 0; x < grid.width(); ++x) {
            if (grid.occupied({x, y})) {
                row[static_cast<std::size_t>(x)] = '#';
            }
        }
    }
    for (const auto& [label, cell] : map.waypoints) {
        rows[static_cast<std::size_t>(grid.height() - 1 - cell.y)][static_cast<std::size_t>(cell.x)] =
            label;
    }
    return rows;
}

}  // namespace caami::world
