#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "drtplan/metrics.hpp"
#include "drtplan/planner.hpp"
#include "drtplan/tessellation.hpp"
#include "drtplan/transit.hpp"

namespace drtplan {

enum class PlannerMode { AccEq, Baseline };

const char* mode_name(PlannerMode m);
PlannerMode parse_mode(const std::string& s);

struct ScenarioConfig {
  // Relative paths resolve against base_dir (the config file's directory).
  std::filesystem::path base_dir = ".";
  std::filesystem::path gtfs_dir;
  std::filesystem::path population_file;
  std::filesystem::path output_dir = "out";

  std::optional<BoundingBox> bbox;  // absent: population extent
  double tile_length_km = 1.0;
  double max_station_dist_km = 5.0;
  bool require_population = true;

  double walking_speed_kmh = 4.5;
  std::map<std::string, double> headway_overrides_min;
  std::optional<double> slot_start_min;
  std::optional<double> slot_end_min;

  PlannerConfig planner;

  int fleet_size = 0;
  PlannerMode mode = PlannerMode::AccEq;
  std::optional<std::uint64_t> seed;

  std::vector<double> m_values{10.0, 100.0};
  bool write_travel_times = false;
  bool write_od = false;

  // Unknown keys are rejected; messages name the offending field.
  static ScenarioConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
  static ScenarioConfig load(const std::filesystem::path& file);
  nlohmann::json to_json() const;
  void validate() const;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

struct ScenarioData {
  TileGrid grid;  // study area applied
  TransitNetwork network;
  std::vector<DrtArea> candidates;
};

ScenarioData load_scenario_data(const ScenarioConfig& config);

struct ScenarioResult {
  InequalityReport before;
  InequalityReport after;
  std::vector<double> acc_before;  // per centroid
  std::vector<double> acc_after;
  FleetAllocation allocation;
  std::vector<int> candidate_ids;
  std::size_t terminal_areas = 0;
  int study_tiles = 0;
};

// Runs ingestion, demand, the allocation and writes every artifact into the
// output directory.
ScenarioResult run_scenario(const ScenarioConfig& config);
// Same pipeline on already loaded data; nothing is written when `out` is empty.
ScenarioResult run_scenario(const ScenarioConfig& config, const ScenarioData& data,
                            const std::optional<std::filesystem::path>& out);

// metrics.json content: mode, seed, both reports and the fleet summary.
nlohmann::json metrics_summary(const ScenarioConfig& config, const ScenarioResult& result);

struct SweepRow {
  int fleet_size = 0;
  InequalityReport report;
};

// Metrics after each fleet size in ascending N_values. The greedy and the
// seeded baseline are sequential, so a run to max(N) passes through every
// smaller fleet size with the same state a separate run would reach.
std::vector<SweepRow> sweep_fleet(const ScenarioConfig& config, const ScenarioData& data,
                                  std::span<const int> fleet_sizes);
// N,mean_acc,bottom10_acc,atkinson,theil,pietra,palma
void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace drtplan
