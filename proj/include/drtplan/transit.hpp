#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drtplan/csv.hpp"
#include "drtplan/geo.hpp"

namespace drtplan {

struct Station {
  std::string id;
  std::string name;
  LatLon location;
  std::vector<int> lines;  // indices into TransitNetwork::lines()
};

// One direction of a frequency-based line. Times in minutes.
struct Line {
  std::string id;  // "<route_id>:<direction>"
  std::string route_id;
  int direction = 0;
  std::vector<int> stations;     // station indices, in travel order
  std::vector<double> run_min;   // run_min[j]: stations[j] -> stations[j+1], excluding dwell
  std::vector<double> dwell_min; // dwell at stations[j]
  double headway_min = 0.0;

  double scheduled_time_min(std::size_t from, std::size_t to) const;
};

// Average wait for a line's vehicle: half the headway. Also used as the
// re-boarding wait when changing lines.
inline double boarding_wait_min(const Line& line) { return line.headway_min / 2.0; }

class TransitNetwork {
 public:
  explicit TransitNetwork(double walking_speed_kmh = 4.5);

  int add_station(std::string id, std::string name, LatLon location);
  // Validates the line invariants and registers it on its stations.
  int add_line(Line line);
  // Adds both directions with mirrored run/dwell times.
  void add_bidirectional_line(const std::string& route_id, const std::vector<int>& stations,
                              const std::vector<double>& run_min, const std::vector<double>& dwell_min,
                              double headway_min);

  const std::vector<Station>& stations() const { return stations_; }
  const std::vector<Line>& lines() const { return lines_; }
  const Station& station(int i) const { return stations_.at(static_cast<std::size_t>(i)); }
  const Line& line(int i) const { return lines_.at(static_cast<std::size_t>(i)); }
  std::optional<int> find_station(const std::string& id) const;
  std::vector<LatLon> station_locations() const;
  // First or last station of some line.
  bool is_terminal(int station) const;

  double walking_speed_kmh() const { return walking_speed_kmh_; }
  void set_walking_speed_kmh(double v);

 private:
  double walking_speed_kmh_;
  std::vector<Station> stations_;
  std::vector<Line> lines_;
  std::map<std::string, int> station_index_;
};

struct GtfsTables {
  CsvTable stops;
  CsvTable routes;
  CsvTable trips;
  CsvTable stop_times;
};

struct GtfsOptions {
  // Keyed by route_id (both directions) or line id "<route_id>:<direction>".
  std::map<std::string, double> headway_overrides_min;
  // Only trips whose first departure falls in [start, end) minutes after
  // midnight are used for headway inference and run times.
  std::optional<double> slot_start_min;
  std::optional<double> slot_end_min;
  double walking_speed_kmh = 4.5;
  // Mirror routes that appear in only one direction.
  bool mirror_single_direction = true;
};

GtfsTables read_gtfs_dir(const std::filesystem::path& dir);
TransitNetwork ingest_gtfs(const GtfsTables& tables, const GtfsOptions& options = {});

// "HH:MM:SS" (hours may exceed 23) to minutes after midnight.
double parse_gtfs_time_min(const std::string& s);

}  // namespace drtplan
