#include "drtplan/transit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "drtplan/error.hpp"

namespace drtplan {

double Line::scheduled_time_min(std::size_t from, std::size_t to) const {
  double t = 0.0;
  for (std::size_t j = from; j < to; ++j) {
    t += run_min.at(j);
    if (j > from) t += dwell_min.at(j);
  }
  return t;
}

TransitNetwork::TransitNetwork(double walking_speed_kmh) : walking_speed_kmh_(walking_speed_kmh) {
  if (!(walking_speed_kmh > 0.0)) throw_invalid("walking speed must be positive");
}

void TransitNetwork::set_walking_speed_kmh(double v) {
  if (!(v > 0.0)) throw_invalid("walking speed must be positive");
  walking_speed_kmh_ = v;
}

int TransitNetwork::add_station(std::string id, std::string name, LatLon location) {
  if (station_index_.count(id)) throw_data(fmt::format("duplicate station id '{}'", id));
  const int idx = static_cast<int>(stations_.size());
  station_index_.emplace(id, idx);
  stations_.push_back(Station{std::move(id), std::move(name), location, {}});
  return idx;
}

int TransitNetwork::add_line(Line line) {
  const std::size_t n = line.stations.size();
  if (n < 2) throw_data(fmt::format("line '{}' needs at least two stations", line.id));
  if (line.run_min.size() != n - 1) throw_data(fmt::format("line '{}': run time count mismatch", line.id));
  if (line.dwell_min.size() != n) throw_data(fmt::format("line '{}': dwell time count mismatch", line.id));
  if (!(line.headway_min > 0.0)) throw_data(fmt::format("line '{}': headway must be positive", line.id));
  for (double r : line.run_min)
    if (!(r > 0.0)) throw_data(fmt::format("line '{}': run times must be positive", line.id));
  for (double d : line.dwell_min)
    if (!(d >= 0.0)) throw_data(fmt::format("line '{}': dwell times must be non-negative", line.id));
  for (int s : line.stations)
    if (s < 0 || static_cast<std::size_t>(s) >= stations_.size())
      throw_data(fmt::format("line '{}' references unknown station {}", line.id, s));

  const int idx = static_cast<int>(lines_.size());
  for (int s : std::set<int>(line.stations.begin(), line.stations.end()))
    stations_[static_cast<std::size_t>(s)].lines.push_back(idx);
  lines_.push_back(std::move(line));
  return idx;
}

void TransitNetwork::add_bidirectional_line(const std::string& route_id, const std::vector<int>& stations,
                                            const std::vector<double>& run_min, const std::vector<double>& dwell_min,
                                            double headway_min) {
  Line fwd{route_id + ":0", route_id, 0, stations, run_min, dwell_min, headway_min};
  Line back{route_id + ":1", route_id, 1, {stations.rbegin(), stations.rend()}, {run_min.rbegin(), run_min.rend()},
            {dwell_min.rbegin(), dwell_min.rend()}, headway_min};
  add_line(std::move(fwd));
  add_line(std::move(back));
}

std::optional<int> TransitNetwork::find_station(const std::string& id) const {
  auto it = station_index_.find(id);
  if (it == station_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<LatLon> TransitNetwork::station_locations() const {
  std::vector<LatLon> out;
  out.reserve(stations_.size());
  for (const auto& s : stations_) out.push_back(s.location);
  return out;
}

bool TransitNetwork::is_terminal(int station) const {
  for (const auto& l : lines_)
    if (l.stations.front() == station || l.stations.back() == station) return true;
  return false;
}

double parse_gtfs_time_min(const std::string& s) {
  int h = 0, m = 0, sec = 0;
  char c1 = 0, c2 = 0;
  if (std::sscanf(s.c_str(), "%d%c%d%c%d", &h, &c1, &m, &c2, &sec) != 5 || c1 != ':' || c2 != ':' || h < 0 ||
      m < 0 || m > 59 || sec < 0 || sec > 59)
    throw_data(fmt::format("malformed GTFS time '{}'", s));
  return h * 60.0 + m + sec / 60.0;
}

GtfsTables read_gtfs_dir(const std::filesystem::path& dir) {
  return GtfsTables{CsvTable::read_file(dir / "stops.txt"), CsvTable::read_file(dir / "routes.txt"),
                    CsvTable::read_file(dir / "trips.txt"), CsvTable::read_file(dir / "stop_times.txt")};
}

namespace {

struct StopTime {
  int sequence = 0;
  double arrival = 0.0;
  double departure = 0.0;
  int station = -1;
};

struct Trip {
  std::string id;
  std::string route_id;
  int direction = 0;
  std::vector<StopTime> stops;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TransitNetwork ingest_gtfs(const GtfsTables& g, const GtfsOptions& options) {
  TransitNetwork net(options.walking_speed_kmh);

  // Stops collapse onto their parent station when one is listed. Stations
  // are materialized at the end, in stops.txt order, only if a line uses them.
  struct StopRecord {
    std::string name;
    LatLon location;
  };
  std::vector<std::string> stop_order;
  std::map<std::string, StopRecord> stop_records;
  std::map<std::string, std::string> stop_parent;
  {
    const auto& t = g.stops;
    const std::size_t id_col = t.require_column("stop_id");
    const std::size_t lat_col = t.require_column("stop_lat");
    const std::size_t lon_col = t.require_column("stop_lon");
    const std::size_t name_col = t.require_column("stop_name");
    const auto parent_col = t.find_column("parent_station");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const std::string& id = t.cell(r, id_col);
      if (stop_records.count(id)) throw_data(fmt::format("{}: duplicate stop_id '{}'", t.where(r), id));
      stop_order.push_back(id);
      stop_records[id] = StopRecord{t.cell(r, name_col), {t.number(r, lat_col), t.number(r, lon_col)}};
      if (parent_col && !t.cell(r, *parent_col).empty()) stop_parent[id] = t.cell(r, *parent_col);
    }
  }
  std::vector<std::string> station_keys;
  std::map<std::string, int> station_key_index;
  auto station_of = [&](const std::string& stop_id, const std::string& where) {
    if (!stop_records.count(stop_id)) throw_data(fmt::format("{}: unknown stop_id '{}'", where, stop_id));
    std::string key = stop_id;
    if (auto it = stop_parent.find(stop_id); it != stop_parent.end() && stop_records.count(it->second))
      key = it->second;
    auto [it, inserted] = station_key_index.emplace(key, static_cast<int>(station_keys.size()));
    if (inserted) station_keys.push_back(key);
    return it->second;
  };

  std::set<std::string> route_ids;
  {
    const std::size_t c = g.routes.require_column("route_id");
    for (std::size_t r = 0; r < g.routes.rows(); ++r) route_ids.insert(g.routes.cell(r, c));
  }

  std::map<std::string, Trip> trips;
  {
    const auto& t = g.trips;
    const std::size_t trip_col = t.require_column("trip_id");
    const std::size_t route_col = t.require_column("route_id");
    const std::size_t dir_col = t.require_column("direction_id");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      Trip trip;
      trip.id = t.cell(r, trip_col);
      trip.route_id = t.cell(r, route_col);
      if (!route_ids.count(trip.route_id))
        throw_data(fmt::format("{}: trip '{}' references unknown route '{}'", t.where(r), trip.id, trip.route_id));
      trip.direction = t.cell(r, dir_col).empty() ? 0 : static_cast<int>(t.integer(r, dir_col));
      if (!trips.emplace(trip.id, trip).second) throw_data(fmt::format("{}: duplicate trip '{}'", t.where(r), trip.id));
    }
  }
  {
    const auto& t = g.stop_times;
    const std::size_t trip_col = t.require_column("trip_id");
    const std::size_t seq_col = t.require_column("stop_sequence");
    const std::size_t arr_col = t.require_column("arrival_time");
    const std::size_t dep_col = t.require_column("departure_time");
    const std::size_t stop_col = t.require_column("stop_id");
    for (std::size_t r = 0; r < t.rows(); ++r) {
      auto it = trips.find(t.cell(r, trip_col));
      if (it == trips.end()) throw_data(fmt::format("{}: unknown trip_id '{}'", t.where(r), t.cell(r, trip_col)));
      StopTime st;
      st.sequence = static_cast<int>(t.integer(r, seq_col));
      st.arrival = parse_gtfs_time_min(t.cell(r, arr_col));
      st.departure = parse_gtfs_time_min(t.cell(r, dep_col));
      st.station = station_of(t.cell(r, stop_col), t.where(r));
      it->second.stops.push_back(st);
    }
  }

  // Group trips by route direction; validate timing.
  std::map<std::pair<std::string, int>, std::vector<const Trip*>> groups;
  for (auto& [id, trip] : trips) {
    std::sort(trip.stops.begin(), trip.stops.end(),
              [](const StopTime& a, const StopTime& b) { return a.sequence < b.sequence; });
    if (trip.stops.size() < 2) continue;
    for (std::size_t j = 0; j < trip.stops.size(); ++j) {
      const auto& s = trip.stops[j];
      if (s.departure < s.arrival || (j + 1 < trip.stops.size() && trip.stops[j + 1].arrival <= s.departure))
        throw_data(fmt::format("non-monotone stop_times in trip '{}'", id));
    }
    groups[{trip.route_id, trip.direction}].push_back(&trip);
  }

  auto in_slot = [&](const Trip* t) {
    const double start = t->stops.front().departure;
    if (options.slot_start_min && start < *options.slot_start_min) return false;
    if (options.slot_end_min && start >= *options.slot_end_min) return false;
    return true;
  };

  std::vector<Line> built;
  for (const auto& [key, all_trips] : groups) {
    const auto& [route_id, direction] = key;
    std::vector<const Trip*> group;
    for (const Trip* t : all_trips)
      if (in_slot(t)) group.push_back(t);
    if (group.empty()) continue;

    Line line;
    line.route_id = route_id;
    line.direction = direction;
    line.id = fmt::format("{}:{}", route_id, direction);

    // Representative pattern: longest trip, ties by trip id (map order).
    const Trip* rep = group.front();
    for (const Trip* t : group)
      if (t->stops.size() > rep->stops.size()) rep = t;
    for (const auto& s : rep->stops) line.stations.push_back(s.station);

    const std::size_t n = line.stations.size();
    line.run_min.assign(n - 1, 0.0);
    line.dwell_min.assign(n, 0.0);
    int matching = 0;
    for (const Trip* t : group) {
      if (t->stops.size() != n) continue;
      bool same = true;
      for (std::size_t j = 0; j < n && same; ++j) same = t->stops[j].station == line.stations[j];
      if (!same) continue;
      ++matching;
      for (std::size_t j = 0; j < n; ++j) {
        line.dwell_min[j] += t->stops[j].departure - t->stops[j].arrival;
        if (j + 1 < n) line.run_min[j] += t->stops[j + 1].arrival - t->stops[j].departure;
      }
    }
    for (auto& v : line.run_min) v /= matching;
    for (auto& v : line.dwell_min) v /= matching;

    if (auto it = options.headway_overrides_min.find(line.id); it != options.headway_overrides_min.end()) {
      line.headway_min = it->second;
    } else if (auto it2 = options.headway_overrides_min.find(route_id); it2 != options.headway_overrides_min.end()) {
      line.headway_min = it2->second;
    } else {
      std::vector<double> starts;
      for (const Trip* t : group) starts.push_back(t->stops.front().departure);
      std::sort(starts.begin(), starts.end());
      std::vector<double> gaps;
      for (std::size_t i = 1; i < starts.size(); ++i)
        if (starts[i] > starts[i - 1]) gaps.push_back(starts[i] - starts[i - 1]);
      if (gaps.empty()) throw_data(fmt::format("cannot infer headway for line '{}'", line.id));
      line.headway_min = median(gaps);
    }
    built.push_back(std::move(line));
  }

  if (options.mirror_single_direction) {
    std::map<std::string, int> directions;
    for (const auto& l : built) ++directions[l.route_id];
    const std::size_t count = built.size();
    for (std::size_t i = 0; i < count; ++i) {
      if (directions[built[i].route_id] != 1) continue;
      Line back = built[i];
      back.direction = 1 - built[i].direction;
      back.id = fmt::format("{}:{}", back.route_id, back.direction);
      std::reverse(back.stations.begin(), back.stations.end());
      std::reverse(back.run_min.begin(), back.run_min.end());
      std::reverse(back.dwell_min.begin(), back.dwell_min.end());
      if (auto it = options.headway_overrides_min.find(back.id); it != options.headway_overrides_min.end())
        back.headway_min = it->second;
      built.push_back(std::move(back));
    }
  }
  std::sort(built.begin(), built.end(), [](const Line& a, const Line& b) { return a.id < b.id; });

  // Provisional key indices -> final station indices in stops.txt order.
  std::vector<int> remap(station_keys.size(), -1);
  std::vector<bool> used(station_keys.size(), false);
  for (const auto& l : built)
    for (int s : l.stations) used[static_cast<std::size_t>(s)] = true;
  for (const auto& id : stop_order) {
    auto it = station_key_index.find(id);
    if (it == station_key_index.end() || !used[static_cast<std::size_t>(it->second)]) continue;
    const auto& rec = stop_records.at(id);
    remap[static_cast<std::size_t>(it->second)] = net.add_station(id, rec.name, rec.location);
  }
  for (auto& l : built) {
    for (int& s : l.stations) s = remap[static_cast<std::size_t>(s)];
    net.add_line(std::move(l));
  }
  if (net.lines().empty()) throw_data("GTFS feed contains no usable trips");
  return net;
}

}  // namespace drtplan
