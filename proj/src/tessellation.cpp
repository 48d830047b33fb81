#include "drtplan/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "drtplan/csv.hpp"
#include "drtplan/error.hpp"

namespace drtplan {

TileGrid::TileGrid(BoundingBox bbox, double tile_length_km, int rows, int cols)
    : bbox_(bbox),
      tile_length_km_(tile_length_km),
      rows_(rows),
      cols_(cols),
      projection_(bbox.center()),
      sw_corner_(projection_.forward({bbox.lat_min, bbox.lon_min})) {
  tiles_.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Tile t;
      t.id = index(r, c);
      t.row = r;
      t.col = c;
      t.centroid = from_grid_plane({(c + 0.5) * tile_length_km, (r + 0.5) * tile_length_km});
      tiles_.push_back(t);
    }
  }
}

PlanarPoint TileGrid::to_grid_plane(const LatLon& p) const {
  const PlanarPoint q = projection_.forward(p);
  return {q.x - sw_corner_.x, q.y - sw_corner_.y};
}

LatLon TileGrid::from_grid_plane(const PlanarPoint& p) const {
  return projection_.inverse({p.x + sw_corner_.x, p.y + sw_corner_.y});
}

LatLon TileGrid::lattice_point(int row, int col) const {
  return from_grid_plane({col * tile_length_km_, row * tile_length_km_});
}

std::vector<int> TileGrid::study_tiles() const {
  std::vector<int> ids;
  for (const auto& t : tiles_)
    if (t.in_study_area) ids.push_back(t.id);
  return ids;
}

double TileGrid::total_population() const {
  double sum = 0.0;
  for (const auto& t : tiles_) sum += t.rho * tile_area_km2();
  return sum;
}

bool DrtArea::contains(int tile_id) const {
  return std::find(member_tiles.begin(), member_tiles.end(), tile_id) != member_tiles.end();
}

namespace {

// Lower-cell rule on boundaries: a coordinate on k*l (to within projection
// round-off) belongs to cell k-1.
int bin_index(double coord, double l, int count) {
  const int idx = static_cast<int>(std::ceil(coord / l - 1e-9)) - 1;
  return std::clamp(idx, 0, count - 1);
}

int nearest_station(const LatLon& p, std::span<const LatLon> stations, double* dist_out) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < stations.size(); ++s) {
    const double d = great_circle_km(p, stations[s]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(s);
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

}  // namespace

TileGrid build_grid(const BoundingBox& bbox, double tile_length_km, const PopulationSource& population) {
  if (!(tile_length_km > 0.0) || !std::isfinite(tile_length_km))
    throw_invalid(fmt::format("tile length must be positive (got {})", tile_length_km));
  if (!(bbox.lat_max > bbox.lat_min) || !(bbox.lon_max > bbox.lon_min))
    throw_invalid("bounding box is degenerate");
  if (population.empty()) throw_data("no population data");

  const LocalProjection proj(bbox.center());
  const PlanarPoint sw = proj.forward({bbox.lat_min, bbox.lon_min});
  const PlanarPoint ne = proj.forward({bbox.lat_max, bbox.lon_max});
  // Tolerance keeps exact multiples of l from growing a sliver row/column.
  const int cols = std::max(1, static_cast<int>(std::ceil((ne.x - sw.x) / tile_length_km - 1e-9)));
  const int rows = std::max(1, static_cast<int>(std::ceil((ne.y - sw.y) / tile_length_km - 1e-9)));

  TileGrid grid(bbox, tile_length_km, rows, cols);
  std::vector<double> people(grid.tiles().size(), 0.0);
  std::vector<double> opportunities(grid.tiles().size(), 0.0);
  bool explicit_opportunities = false;
  std::size_t assigned = 0;

  auto add = [&](int id, double pop, double opp) {
    if (pop < 0.0 || !std::isfinite(pop)) throw_data(fmt::format("negative or non-finite population {}", pop));
    people[static_cast<std::size_t>(id)] += pop;
    if (opp >= 0.0) {
      explicit_opportunities = true;
      opportunities[static_cast<std::size_t>(id)] += opp;
    } else {
      opportunities[static_cast<std::size_t>(id)] += pop;
    }
    ++assigned;
  };

  for (const auto& p : population.points) {
    if (!bbox.contains(p.location)) continue;
    const PlanarPoint q = grid.to_grid_plane(p.location);
    add(grid.index(bin_index(q.y, tile_length_km, rows), bin_index(q.x, tile_length_km, cols)), p.population,
        p.opportunities);
  }
  for (const auto& c : population.cells) {
    if (!grid.in_bounds(c.row, c.col))
      throw_data(fmt::format("binned population cell ({}, {}) outside the {}x{} grid", c.row, c.col, rows, cols));
    add(grid.index(c.row, c.col), c.population, c.opportunities);
  }
  if (assigned == 0) throw_data("no population data");

  const double area = grid.tile_area_km2();
  for (auto& t : grid.tiles()) {
    t.rho = people[static_cast<std::size_t>(t.id)] / area;
    t.sigma = explicit_opportunities ? opportunities[static_cast<std::size_t>(t.id)] / area : t.rho;
    t.in_study_area = true;
  }
  return grid;
}

TileGrid filter_study_area(const TileGrid& grid, std::span<const LatLon> stations, double max_station_km,
                           bool require_population) {
  if (stations.empty()) throw_invalid("study-area filtering needs at least one station");
  TileGrid out = grid;
  for (auto& t : out.tiles()) {
    double d = 0.0;
    nearest_station(t.centroid, stations, &d);
    const bool too_far = d > max_station_km;
    const bool empty = require_population && !(t.rho > 0.0);
    t.in_study_area = !too_far && !empty;
  }
  return out;
}

std::vector<DrtArea> partition_drt_areas(const TileGrid& grid, std::span<const LatLon> stations, int K) {
  if (K <= 0 || K % 2 != 0) throw_invalid(fmt::format("DRT area size K must be a positive even number (got {})", K));
  if (stations.empty()) throw_invalid("no station available for DRT areas");
  const int half = K / 2;
  std::vector<DrtArea> areas;
  for (int r0 = 0; r0 + 1 < grid.rows(); r0 += 2) {
    for (int c0 = 0; c0 + half <= grid.cols(); c0 += half) {
      std::vector<int> members;
      members.reserve(static_cast<std::size_t>(K));
      // Serpentine: upper row eastbound from s_1, then lower row westbound.
      for (int c = c0; c < c0 + half; ++c) members.push_back(grid.index(r0 + 1, c));
      for (int c = c0 + half - 1; c >= c0; --c) members.push_back(grid.index(r0, c));
      const bool all_in = std::all_of(members.begin(), members.end(),
                                      [&](int id) { return grid.tile(id).in_study_area; });
      if (!all_in) continue;

      DrtArea a;
      a.id = static_cast<int>(areas.size());
      a.member_tiles = std::move(members);
      a.block_row = r0;
      a.block_col = c0;
      a.entry_point = grid.from_grid_plane({c0 * grid.tile_length_km(), (r0 + 1) * grid.tile_length_km()});
      a.station = nearest_station(a.entry_point, stations, &a.d_km);
      areas.push_back(std::move(a));
    }
  }
  return areas;
}

PopulationSource read_population_csv(const std::filesystem::path& path) {
  const CsvTable t = CsvTable::read_file(path);
  PopulationSource src;
  const std::size_t pop_col = t.require_column("population");
  const auto opp_col = t.find_column("opportunities");
  const bool points = t.has_column("lat") && t.has_column("lon");
  if (points) {
    const std::size_t lat = t.require_column("lat");
    const std::size_t lon = t.require_column("lon");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      PopulationPoint p;
      p.location = {t.number(r, lat), t.number(r, lon)};
      p.population = t.number(r, pop_col);
      if (opp_col) p.opportunities = t.number(r, *opp_col);
      src.points.push_back(p);
    }
  } else {
    const std::size_t row = t.require_column("row");
    const std::size_t col = t.require_column("col");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      BinnedPopulation c;
      c.row = static_cast<int>(t.integer(r, row));
      c.col = static_cast<int>(t.integer(r, col));
      c.population = t.number(r, pop_col);
      if (opp_col) c.opportunities = t.number(r, *opp_col);
      src.cells.push_back(c);
    }
  }
  if (src.empty()) throw_data(fmt::format("{}: no population data", path.string()));
  return src;
}

void write_grid_csv(const TileGrid& grid, std::ostream& out) {
  out << "tile_id,row,col,lat,lon,rho,in_study_area\n";
  for (const auto& t : grid.tiles()) {
    fmt::print(out, "{},{},{},{:.7f},{:.7f},{},{}\n", t.id, t.row, t.col, t.centroid.lat, t.centroid.lon, t.rho,
               t.in_study_area ? 1 : 0);
  }
}

}  // namespace drtplan
