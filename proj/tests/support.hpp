#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "drtplan/geo.hpp"
#include "drtplan/tessellation.hpp"
#include "drtplan/transit.hpp"

namespace drtplan::test {

// Box of exactly rows x cols tiles of side l around a reference point.
inline BoundingBox box_km(int rows, int cols, double l = 1.0, LatLon c = {45.5, -73.6}) {
  const double deg = 180.0 / std::numbers::pi / kEarthRadiusKm;
  const double dlat = rows * l * deg;
  const double dlon = cols * l * deg / std::cos(c.lat * std::numbers::pi / 180.0);
  return {c.lat - dlat / 2.0, c.lon - dlon / 2.0, c.lat + dlat / 2.0, c.lon + dlon / 2.0};
}

// Grid with the given per-tile population (row-major, row 0 south).
inline TileGrid grid_with(int rows, int cols, const std::vector<double>& pop, double l = 1.0,
                          const std::vector<double>& opportunities = {}) {
  PopulationSource src;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const auto i = static_cast<std::size_t>(r * cols + c);
      src.cells.push_back({r, c, pop.at(i), opportunities.empty() ? -1.0 : opportunities.at(i)});
    }
  return build_grid(box_km(rows, cols, l), l, src);
}

inline LatLon at_km(const TileGrid& g, double x, double y) { return g.from_grid_plane({x, y}); }

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("drtplan_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace drtplan::test
