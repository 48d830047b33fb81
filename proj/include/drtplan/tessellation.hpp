#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "drtplan/geo.hpp"

namespace drtplan {

struct Tile {
  int id = 0;
  int row = 0;  // 0 = southernmost
  int col = 0;  // 0 = westernmost
  LatLon centroid;
  double rho = 0.0;    // population density, people/km^2
  double sigma = 0.0;  // opportunity density, opportunities/km^2
  bool in_study_area = true;
};

struct PopulationPoint {
  LatLon location;
  double population = 0.0;
  double opportunities = -1.0;  // negative: use population
};

struct BinnedPopulation {
  int row = 0;
  int col = 0;
  double population = 0.0;
  double opportunities = -1.0;
};

// Either raw points or pre-binned cells; both may be filled.
struct PopulationSource {
  std::vector<PopulationPoint> points;
  std::vector<BinnedPopulation> cells;

  bool empty() const { return points.empty() && cells.empty(); }
};

// Regular square lattice over a bounding box. Tile ids are row-major:
// id = row * cols + col.
class TileGrid {
 public:
  TileGrid() = default;
  TileGrid(BoundingBox bbox, double tile_length_km, int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double tile_length_km() const { return tile_length_km_; }
  double tile_area_km2() const { return tile_length_km_ * tile_length_km_; }
  const BoundingBox& bbox() const { return bbox_; }
  const LocalProjection& projection() const { return projection_; }

  std::span<const Tile> tiles() const { return tiles_; }
  std::span<Tile> tiles() { return tiles_; }
  const Tile& tile(int id) const { return tiles_.at(static_cast<std::size_t>(id)); }
  Tile& tile(int id) { return tiles_.at(static_cast<std::size_t>(id)); }
  int index(int row, int col) const { return row * cols_ + col; }
  bool in_bounds(int row, int col) const { return row >= 0 && row < rows_ && col >= 0 && col < cols_; }

  // Planar coordinates (km) relative to the south-west grid corner.
  PlanarPoint to_grid_plane(const LatLon& p) const;
  LatLon from_grid_plane(const PlanarPoint& p) const;
  // Corner (lat, lon) of the cell boundary lattice point (row, col), 0..rows / 0..cols.
  LatLon lattice_point(int row, int col) const;

  // Ids of in-study tiles in ascending order.
  std::vector<int> study_tiles() const;
  double total_population() const;

 private:
  BoundingBox bbox_{};
  double tile_length_km_ = 1.0;
  int rows_ = 0;
  int cols_ = 0;
  LocalProjection projection_;
  PlanarPoint sw_corner_{};
  std::vector<Tile> tiles_;
};

struct DrtArea {
  int id = 0;
  std::vector<int> member_tiles;  // serving order, s_1 first
  LatLon entry_point;             // s_1
  int station = -1;               // index into the station set used for partitioning
  double d_km = 0.0;              // great-circle station -> entry point
  int block_row = 0;              // lower row of the 2-row block
  int block_col = 0;              // western column of the block

  int K() const { return static_cast<int>(member_tiles.size()); }
  bool contains(int tile_id) const;
};

// Bins population into l x l cells. Points outside the box are dropped;
// points on a cell boundary go to the cell with the lower (row, col).
// rho = population / l^2; sigma = opportunities / l^2 (defaults to rho).
TileGrid build_grid(const BoundingBox& bbox, double tile_length_km, const PopulationSource& population);

// Marks tiles farther than max_station_km from every station (or with zero
// population, when require_population) as outside the study area. Idempotent.
TileGrid filter_study_area(const TileGrid& grid, std::span<const LatLon> stations, double max_station_km,
                           bool require_population = true);

// Disjoint grid-anchored 2 x (K/2) blocks of in-study tiles. s_1 is the
// midpoint of the western block edge, s_A the nearest station to s_1.
std::vector<DrtArea> partition_drt_areas(const TileGrid& grid, std::span<const LatLon> stations, int K);

// Population CSV: header (lat, lon, population) or (row, col, population),
// optional "opportunities" column.
PopulationSource read_population_csv(const std::filesystem::path& path);

// tile_id,row,col,lat,lon,rho,in_study_area
void write_grid_csv(const TileGrid& grid, std::ostream& out);

}  // namespace drtplan
