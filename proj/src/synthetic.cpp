#include "drtplan/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "drtplan/error.hpp"
#include "drtplan/scenario.hpp"

namespace drtplan {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

BoundingBox square_box(const SyntheticCityOptions& o) {
  const double deg = 180.0 / std::numbers::pi / kEarthRadiusKm;
  const double dlat = o.rows * o.tile_length_km * deg;
  const double dlon = o.cols * o.tile_length_km * deg / std::cos(o.center.lat * std::numbers::pi / 180.0);
  return {o.center.lat - dlat / 2.0, o.center.lon - dlon / 2.0, o.center.lat + dlat / 2.0, o.center.lon + dlon / 2.0};
}

std::vector<double> line_positions(double length_km, double spacing_km) {
  std::vector<double> pos;
  for (double x = 0.5; x <= length_km - 0.5 + 1e-9; x += spacing_km) pos.push_back(x);
  return pos;
}

std::string clock(double minutes) {
  const long total = std::lround(minutes * 60.0);
  return fmt::format("{:02}:{:02}:{:02}", total / 3600, (total / 60) % 60, total % 60);
}

}  // namespace

SyntheticCity make_synthetic_city(const SyntheticCityOptions& o) {
  if (o.rows < 2 || o.cols < 2) throw_invalid("synthetic city needs at least 2 x 2 tiles");
  SyntheticCity city;
  city.bbox = square_box(o);
  const TileGrid grid(city.bbox, o.tile_length_km, o.rows, o.cols);

  std::mt19937_64 rng(o.seed);
  const double cx = o.cols * o.tile_length_km / 2.0;
  const double cy = o.rows * o.tile_length_km / 2.0;
  for (int r = 0; r < o.rows; ++r) {
    for (int c = 0; c < o.cols; ++c) {
      const double x = (c + 0.5) * o.tile_length_km - cx;
      const double y = (r + 0.5) * o.tile_length_km - cy;
      const double boost = 1.0 + o.center_boost * std::exp(-(x * x + y * y) / (2.0 * o.center_sigma_km * o.center_sigma_km));
      const double base = o.pop_min + (o.pop_max - o.pop_min) * unit_uniform(rng);
      city.population.cells.push_back({r, c, std::round(base * boost), -1.0});
    }
  }

  // East-west line along the horizontal mid line, north-south along the
  // vertical one; the crossing station is shared when both hit the centre.
  const double width = o.cols * o.tile_length_km;
  const double height = o.rows * o.tile_length_km;
  auto station_at = [&](double x, double y) {
    const std::string id = fmt::format("S_{}_{}", std::lround(x * 1000), std::lround(y * 1000));
    if (auto s = city.network.find_station(id)) return *s;
    return city.network.add_station(id, id, grid.from_grid_plane({x, y}));
  };
  auto add_line = [&](const std::string& route, const std::vector<int>& stations) {
    std::vector<double> run, dwell(stations.size(), o.dwell_min);
    for (std::size_t i = 0; i + 1 < stations.size(); ++i) {
      const double km = great_circle_km(city.network.station(stations[i]).location,
                                         city.network.station(stations[i + 1]).location);
      run.push_back(std::round(km / o.speed_kmh * 60.0 * 60.0) / 60.0);  // whole seconds
    }
    city.network.add_bidirectional_line(route, stations, run, dwell, o.headway_min);
  };
  std::vector<int> ew, ns;
  for (double x : line_positions(width, o.station_spacing_km)) ew.push_back(station_at(x, height / 2.0));
  for (double y : line_positions(height, o.station_spacing_km)) ns.push_back(station_at(width / 2.0, y));
  add_line("EW", ew);
  add_line("NS", ns);
  return city;
}

void write_synthetic_city(const std::filesystem::path& dir, const SyntheticCityOptions& o) {
  const SyntheticCity city = make_synthetic_city(o);
  std::filesystem::create_directories(dir / "gtfs");
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw_data(fmt::format("cannot write '{}'", p.string()));
    return f;
  };
  const TransitNetwork& net = city.network;
  {
    auto f = open(dir / "gtfs" / "stops.txt");
    f << "stop_id,stop_name,stop_lat,stop_lon\n";
    for (const auto& s : net.stations())
      fmt::print(f, "{},{},{:.7f},{:.7f}\n", s.id, s.name, s.location.lat, s.location.lon);
  }
  {
    auto f = open(dir / "gtfs" / "routes.txt");
    f << "route_id,route_short_name,route_type\n";
    std::vector<std::string> seen;
    for (const auto& l : net.lines()) {
      if (std::find(seen.begin(), seen.end(), l.route_id) != seen.end()) continue;
      seen.push_back(l.route_id);
      fmt::print(f, "{},{},1\n", l.route_id, l.route_id);
    }
  }
  {
    auto trips = open(dir / "gtfs" / "trips.txt");
    auto times = open(dir / "gtfs" / "stop_times.txt");
    trips << "route_id,service_id,trip_id,direction_id\n";
    times << "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n";
    for (const auto& l : net.lines()) {
      // One hour of service from 07:00.
      for (int k = 0; k * l.headway_min < 60.0; ++k) {
        const std::string trip = fmt::format("{}_{}_{}", l.route_id, l.direction, k);
        fmt::print(trips, "{},WD,{},{}\n", l.route_id, trip, l.direction);
        double t = 7 * 60.0 + k * l.headway_min;
        for (std::size_t j = 0; j < l.stations.size(); ++j) {
          const double dep = t + l.dwell_min[j];
          fmt::print(times, "{},{},{},{},{}\n", trip, clock(t), clock(dep), net.station(l.stations[j]).id, j + 1);
          if (j + 1 < l.stations.size()) t = dep + l.run_min[j];
        }
      }
    }
  }
  {
    auto f = open(dir / "population.csv");
    f << "row,col,population\n";
    for (const auto& c : city.population.cells) fmt::print(f, "{},{},{}\n", c.row, c.col, c.population);
  }
  {
    ScenarioConfig cfg;
    cfg.gtfs_dir = "gtfs";
    cfg.population_file = "population.csv";
    cfg.output_dir = "out";
    cfg.bbox = city.bbox;
    cfg.tile_length_km = o.tile_length_km;
    cfg.slot_start_min = 7 * 60.0;
    cfg.slot_end_min = 8 * 60.0;
    auto f = open(dir / "scenario.json");
    f << cfg.to_json().dump(2) << "\n";
  }
}

}  // namespace drtplan
