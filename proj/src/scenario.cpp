#include "drtplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "drtplan/error.hpp"

namespace drtplan {

using nlohmann::json;

const char* mode_name(PlannerMode m) { return m == PlannerMode::AccEq ? "acceq" : "baseline"; }

PlannerMode parse_mode(const std::string& s) {
  if (s == "acceq") return PlannerMode::AccEq;
  if (s == "baseline") return PlannerMode::Baseline;
  throw_config(fmt::format("optimizer.mode: expected 'acceq' or 'baseline', got '{}'", s));
}

namespace {

std::string clock_string(double minutes) {
  const long total = std::lround(minutes * 60.0);
  return fmt::format("{:02}:{:02}:{:02}", total / 3600, (total / 60) % 60, total % 60);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw_config(fmt::format("{}: expected an object", where.empty() ? "config" : where));
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw_config(fmt::format("unknown field '{}{}'", where.empty() ? "" : where + ".", key));
  }
}

const json* section(const json& root, const char* name) {
  auto it = root.find(name);
  return it == root.end() || it->is_null() ? nullptr : &*it;
}

double number(const json& obj, const std::string& where, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw_config(fmt::format("{}.{}: expected a number", where, key));
  return it->get<double>();
}

int integer(const json& obj, const std::string& where, const char* key, int fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number_integer()) throw_config(fmt::format("{}.{}: expected an integer", where, key));
  const auto v = it->get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw_config(fmt::format("{}.{}: out of range", where, key));
  return static_cast<int>(v);
}

bool boolean(const json& obj, const std::string& where, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) throw_config(fmt::format("{}.{}: expected true or false", where, key));
  return it->get<bool>();
}

std::string text(const json& obj, const std::string& where, const char* key, const std::string& fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw_config(fmt::format("{}.{}: expected a string", where, key));
  return it->get<std::string>();
}

std::optional<double> slot_time(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number()) return it->get<double>();
  if (!it->is_string()) throw_config(fmt::format("transit.{}: expected \"HH:MM:SS\"", key));
  try {
    return parse_gtfs_time_min(it->get<std::string>());
  } catch (const Error&) {
    throw_config(fmt::format("transit.{}: expected \"HH:MM:SS\"", key));
  }
}

json report_json(const InequalityReport& r) {
  json j;
  j["atkinson"] = r.atkinson;
  j["theil"] = r.theil;
  j["pietra"] = r.pietra;
  j["palma"] = r.palma ? json(*r.palma) : json(nullptr);
  j["mean_accessibility"] = r.mean;
  json b = json::object();
  for (const auto& [m, v] : r.bottom_m) b[fmt::format("{}", m)] = v;
  j["bottom_m_accessibility"] = b;
  return j;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw_data(fmt::format("cannot write '{}'", p.string()));
  return f;
}

}  // namespace

std::filesystem::path ScenarioConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

ScenarioConfig ScenarioConfig::from_json(const json& root, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  c.base_dir = base_dir;
  reject_unknown(root, "", {"paths", "grid", "transit", "drt", "demand", "optimizer", "metrics", "output"});

  if (const json* s = section(root, "paths")) {
    reject_unknown(*s, "paths", {"gtfs_dir", "population", "output_dir"});
    c.gtfs_dir = text(*s, "paths", "gtfs_dir", "");
    c.population_file = text(*s, "paths", "population", "");
    c.output_dir = text(*s, "paths", "output_dir", c.output_dir.string());
  }
  if (const json* s = section(root, "grid")) {
    reject_unknown(*s, "grid", {"bbox", "tile_length_km", "max_station_dist_km", "require_population"});
    if (auto it = s->find("bbox"); it != s->end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 4 || !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number(); }))
        throw_config("grid.bbox: expected [lat_min, lon_min, lat_max, lon_max]");
      c.bbox = BoundingBox{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(), (*it)[3].get<double>()};
    }
    c.tile_length_km = number(*s, "grid", "tile_length_km", c.tile_length_km);
    c.max_station_dist_km = number(*s, "grid", "max_station_dist_km", c.max_station_dist_km);
    c.require_population = boolean(*s, "grid", "require_population", c.require_population);
  }
  if (const json* s = section(root, "transit")) {
    reject_unknown(*s, "transit", {"walking_speed_kmh", "headway_overrides_min", "slot_start", "slot_end"});
    c.walking_speed_kmh = number(*s, "transit", "walking_speed_kmh", c.walking_speed_kmh);
    if (auto it = s->find("headway_overrides_min"); it != s->end() && !it->is_null()) {
      if (!it->is_object()) throw_config("transit.headway_overrides_min: expected an object");
      for (const auto& [k, v] : it->items()) {
        if (!v.is_number()) throw_config(fmt::format("transit.headway_overrides_min.{}: expected a number", k));
        c.headway_overrides_min[k] = v.get<double>();
      }
    }
    c.slot_start_min = slot_time(*s, "slot_start");
    c.slot_end_min = slot_time(*s, "slot_end");
  }
  DrtParams& d = c.planner.drt;
  if (const json* s = section(root, "drt")) {
    reject_unknown(*s, "drt", {"v_kmh", "tau_stop_s", "tau_terminal_min", "K", "max_headway_h", "symmetric_demand"});
    d.v_drt_kmh = number(*s, "drt", "v_kmh", d.v_drt_kmh);
    d.tau_stop_h = number(*s, "drt", "tau_stop_s", d.tau_stop_h * 3600.0) / 3600.0;
    d.tau_terminal_h = number(*s, "drt", "tau_terminal_min", d.tau_terminal_h * 60.0) / 60.0;
    d.K = integer(*s, "drt", "K", d.K);
    d.max_headway_h = number(*s, "drt", "max_headway_h", d.max_headway_h);
    d.symmetric_demand = boolean(*s, "drt", "symmetric_demand", d.symmetric_demand);
  }
  DemandParams& m = c.planner.demand;
  if (const json* s = section(root, "demand")) {
    reject_unknown(*s, "demand", {"trip_mean_per_day", "t_peak_h", "t_off_peak_h", "ratio", "beta_per_min"});
    m.trip_mean_per_day = number(*s, "demand", "trip_mean_per_day", m.trip_mean_per_day);
    m.t_peak_h = number(*s, "demand", "t_peak_h", m.t_peak_h);
    m.t_off_peak_h = number(*s, "demand", "t_off_peak_h", m.t_off_peak_h);
    if (auto it = s->find("ratio"); it != s->end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
        throw_config("demand.ratio: expected [peak, off_peak]");
      m.ratio_peak = (*it)[0].get<double>();
      m.ratio_off_peak = (*it)[1].get<double>();
    }
    m.beta_per_min = number(*s, "demand", "beta_per_min", m.beta_per_min);
  }
  if (const json* s = section(root, "optimizer")) {
    reject_unknown(*s, "optimizer",
                   {"fleet_size", "alpha", "mode", "seed", "max_assignment_iterations", "flow_tolerance"});
    c.fleet_size = integer(*s, "optimizer", "fleet_size", c.fleet_size);
    c.planner.alpha = number(*s, "optimizer", "alpha", c.planner.alpha);
    c.mode = parse_mode(text(*s, "optimizer", "mode", mode_name(c.mode)));
    if (auto it = s->find("seed"); it != s->end() && !it->is_null()) {
      if (!it->is_number_unsigned()) throw_config("optimizer.seed: expected a non-negative integer");
      c.seed = it->get<std::uint64_t>();
    }
    c.planner.max_assignment_iterations =
        integer(*s, "optimizer", "max_assignment_iterations", c.planner.max_assignment_iterations);
    c.planner.flow_tolerance = number(*s, "optimizer", "flow_tolerance", c.planner.flow_tolerance);
  }
  if (const json* s = section(root, "metrics")) {
    reject_unknown(*s, "metrics", {"m_values"});
    if (auto it = s->find("m_values"); it != s->end() && !it->is_null()) {
      if (!it->is_array()) throw_config("metrics.m_values: expected a list of percentages");
      c.m_values.clear();
      for (const auto& v : *it) {
        if (!v.is_number()) throw_config("metrics.m_values: expected a list of percentages");
        c.m_values.push_back(v.get<double>());
      }
    }
  }
  if (const json* s = section(root, "output")) {
    reject_unknown(*s, "output", {"travel_times", "od_matrix"});
    c.write_travel_times = boolean(*s, "output", "travel_times", c.write_travel_times);
    c.write_od = boolean(*s, "output", "od_matrix", c.write_od);
  }
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw_config(fmt::format("cannot open config '{}'", file.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw_config(fmt::format("{}: {}", file.string(), e.what()));
  }
  return from_json(j, file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

json ScenarioConfig::to_json() const {
  json j;
  j["paths"] = {{"gtfs_dir", gtfs_dir.generic_string()},
                {"population", population_file.generic_string()},
                {"output_dir", output_dir.generic_string()}};
  j["grid"] = {{"bbox", bbox ? json::array({bbox->lat_min, bbox->lon_min, bbox->lat_max, bbox->lon_max}) : json(nullptr)},
               {"tile_length_km", tile_length_km},
               {"max_station_dist_km", max_station_dist_km},
               {"require_population", require_population}};
  json overrides = json::object();
  for (const auto& [k, v] : headway_overrides_min) overrides[k] = v;
  j["transit"] = {{"walking_speed_kmh", walking_speed_kmh},
                  {"headway_overrides_min", overrides},
                  {"slot_start", slot_start_min ? json(clock_string(*slot_start_min)) : json(nullptr)},
                  {"slot_end", slot_end_min ? json(clock_string(*slot_end_min)) : json(nullptr)}};
  const DrtParams& d = planner.drt;
  j["drt"] = {{"v_kmh", d.v_drt_kmh},
              {"tau_stop_s", d.tau_stop_h * 3600.0},
              {"tau_terminal_min", d.tau_terminal_h * 60.0},
              {"K", d.K},
              {"max_headway_h", d.max_headway_h},
              {"symmetric_demand", d.symmetric_demand}};
  const DemandParams& m = planner.demand;
  j["demand"] = {{"trip_mean_per_day", m.trip_mean_per_day},
                 {"t_peak_h", m.t_peak_h},
                 {"t_off_peak_h", m.t_off_peak_h},
                 {"ratio", json::array({m.ratio_peak, m.ratio_off_peak})},
                 {"beta_per_min", m.beta_per_min}};
  j["optimizer"] = {{"fleet_size", fleet_size},
                    {"alpha", planner.alpha},
                    {"mode", mode_name(mode)},
                    {"seed", seed ? json(*seed) : json(nullptr)},
                    {"max_assignment_iterations", planner.max_assignment_iterations},
                    {"flow_tolerance", planner.flow_tolerance}};
  j["metrics"] = {{"m_values", m_values}};
  j["output"] = {{"travel_times", write_travel_times}, {"od_matrix", write_od}};
  return j;
}

void ScenarioConfig::validate() const {
  if (gtfs_dir.empty()) throw_config("paths.gtfs_dir is required");
  if (population_file.empty()) throw_config("paths.population is required");
  if (output_dir.empty()) throw_config("paths.output_dir is required");
  if (bbox && !(bbox->lat_max > bbox->lat_min && bbox->lon_max > bbox->lon_min))
    throw_config("grid.bbox: lat_max/lon_max must exceed lat_min/lon_min");
  if (!(tile_length_km > 0.0)) throw_config("grid.tile_length_km must be positive");
  if (!(max_station_dist_km >= 0.0)) throw_config("grid.max_station_dist_km must be non-negative");
  if (!(walking_speed_kmh > 0.0)) throw_config("transit.walking_speed_kmh must be positive");
  for (const auto& [k, v] : headway_overrides_min)
    if (!(v > 0.0)) throw_config(fmt::format("transit.headway_overrides_min.{} must be positive", k));
  if (slot_start_min && slot_end_min && !(*slot_end_min > *slot_start_min))
    throw_config("transit.slot_end must be later than transit.slot_start");
  const DrtParams& d = planner.drt;
  if (!(d.v_drt_kmh > 0.0)) throw_config("drt.v_kmh must be positive");
  if (!(d.tau_stop_h > 0.0)) throw_config("drt.tau_stop_s must be positive");
  if (!(d.tau_terminal_h > 0.0)) throw_config("drt.tau_terminal_min must be positive");
  if (d.K <= 0 || d.K % 2 != 0) throw_config("drt.K must be a positive even number");
  if (!(d.max_headway_h > 0.0)) throw_config("drt.max_headway_h must be positive");
  const DemandParams& m = planner.demand;
  if (!(m.trip_mean_per_day > 0.0)) throw_config("demand.trip_mean_per_day must be positive");
  if (!(m.t_peak_h >= 0.0) || !(m.t_off_peak_h >= 0.0) || !(m.t_peak_h + m.t_off_peak_h > 0.0))
    throw_config("demand.t_peak_h / demand.t_off_peak_h must be non-negative with a positive sum");
  if (!(m.ratio_peak > 0.0) || !(m.ratio_off_peak > 0.0)) throw_config("demand.ratio entries must be positive");
  if (!(m.beta_per_min > 0.0)) throw_config("demand.beta_per_min must be positive");
  if (fleet_size < 0) throw_config("optimizer.fleet_size must be non-negative");
  if (!(planner.alpha >= 0.0) || !std::isfinite(planner.alpha)) throw_config("optimizer.alpha must be non-negative");
  if (planner.max_assignment_iterations < 1) throw_config("optimizer.max_assignment_iterations must be at least 1");
  if (!(planner.flow_tolerance > 0.0)) throw_config("optimizer.flow_tolerance must be positive");
  if (mode == PlannerMode::Baseline && !seed) throw_config("seed required for baseline");
  for (double v : m_values)
    if (!(v > 0.0 && v <= 100.0)) throw_config("metrics.m_values entries must lie in (0, 100]");
}

ScenarioData load_scenario_data(const ScenarioConfig& config) {
  config.validate();
  const auto gtfs = config.resolve(config.gtfs_dir);
  const auto pop = config.resolve(config.population_file);
  if (!std::filesystem::is_directory(gtfs))
    throw_config(fmt::format("paths.gtfs_dir: '{}' is not a directory", gtfs.string()));
  if (!std::filesystem::is_regular_file(pop))
    throw_config(fmt::format("paths.population: '{}' does not exist", pop.string()));

  const PopulationSource population = read_population_csv(pop);
  BoundingBox bbox;
  if (config.bbox) {
    bbox = *config.bbox;
  } else {
    if (!population.cells.empty() || population.points.empty())
      throw_config("grid.bbox is required for pre-binned population");
    bbox = {90.0, 180.0, -90.0, -180.0};
    for (const auto& p : population.points) {
      bbox.lat_min = std::min(bbox.lat_min, p.location.lat);
      bbox.lat_max = std::max(bbox.lat_max, p.location.lat);
      bbox.lon_min = std::min(bbox.lon_min, p.location.lon);
      bbox.lon_max = std::max(bbox.lon_max, p.location.lon);
    }
  }

  GtfsOptions opts;
  opts.headway_overrides_min = config.headway_overrides_min;
  opts.slot_start_min = config.slot_start_min;
  opts.slot_end_min = config.slot_end_min;
  opts.walking_speed_kmh = config.walking_speed_kmh;

  ScenarioData data;
  data.network = ingest_gtfs(read_gtfs_dir(gtfs), opts);
  const std::vector<LatLon> stations = data.network.station_locations();
  data.grid = filter_study_area(build_grid(bbox, config.tile_length_km, population), stations,
                                config.max_station_dist_km, config.require_population);
  data.candidates = partition_drt_areas(data.grid, stations, config.planner.drt.K);
  return data;
}

namespace {

void write_artifacts(const ScenarioConfig& config, const ScenarioData& data, const Planner& planner,
                     const ScenarioResult& r, const std::filesystem::path& out) {
  std::filesystem::create_directories(out);
  const MultilayerGraph& g = planner.graph();
  const auto& cands = planner.candidates();
  const FleetAllocation& alloc = r.allocation;

  // Buses actually serving each centroid (saturated areas serve nobody).
  std::vector<int> serving(static_cast<std::size_t>(g.centroid_count()), 0);
  for (std::size_t a = 0; a < cands.size(); ++a) {
    if (!alloc.performance[a].feasible || alloc.buses[a] == 0) continue;
    for (int c : planner.area_centroids(static_cast<int>(a))) serving[static_cast<std::size_t>(c)] = alloc.buses[a];
  }
  auto pct = [](double before, double after) { return before > 0.0 ? 100.0 * (after - before) / before : 0.0; };

  {
    auto f = open_out(out / "metrics.json");
    f << metrics_summary(config, r).dump(2) << "\n";
  }
  {
    auto f = open_out(out / "tiles.csv");
    f << "tile_id,acc_before,acc_after,abs_improvement,pct_improvement\n";
    for (int c = 0; c < g.centroid_count(); ++c) {
      const double b = r.acc_before[static_cast<std::size_t>(c)];
      const double a = r.acc_after[static_cast<std::size_t>(c)];
      fmt::print(f, "{},{},{},{},{}\n", g.tile_id(c), b, a, a - b, pct(b, a));
    }
  }
  {
    auto f = open_out(out / "allocation.csv");
    f << "step,area_id,station_id,N_A_after,SCORE,atkinson_after,mean_acc_after\n";
    for (const StepLog& s : alloc.log) {
      const std::string score = s.area_scores.empty() ? "" : fmt::format("{}", s.score);
      fmt::print(f, "{},{},{},{},{},{},{}\n", s.step, s.area_id, data.network.station(s.station).id,
                 s.buses_after, score, s.atkinson_after, s.mean_acc_after);
    }
  }
  {
    auto f = open_out(out / "areas.csv");
    f << "area_id,station_id,block_row,block_col,d_km,terminal,buses,feasible,headway_min,n_total,cycle_min\n";
    const auto terminals = planner.terminal_areas();
    for (std::size_t a = 0; a < cands.size(); ++a) {
      const DrtPerformance& p = alloc.performance[a];
      const bool term = std::find(terminals.begin(), terminals.end(), static_cast<int>(a)) != terminals.end();
      fmt::print(f, "{},{},{},{},{},{},{},{},{},{},{}\n", cands[a].id, data.network.station(cands[a].station).id,
                 cands[a].block_row, cands[a].block_col, cands[a].d_km, term ? 1 : 0, alloc.buses[a],
                 p.feasible ? 1 : 0, p.headway_h * 60.0, p.n_total, p.cycle_time_h * 60.0);
    }
  }
  {
    json features = json::array();
    for (int c = 0; c < g.centroid_count(); ++c) {
      const Tile& t = data.grid.tile(g.tile_id(c));
      json ring = json::array();
      for (auto [dr, dc] : {std::pair{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}}) {
        const LatLon p = data.grid.lattice_point(t.row + dr, t.col + dc);
        ring.push_back(json::array({p.lon, p.lat}));
      }
      const double b = r.acc_before[static_cast<std::size_t>(c)];
      const double a = r.acc_after[static_cast<std::size_t>(c)];
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                          {"properties",
                           {{"tile_id", t.id},
                            {"row", t.row},
                            {"col", t.col},
                            {"rho", t.rho},
                            {"acc_before", b},
                            {"acc_after", a},
                            {"abs_impr", a - b},
                            {"pct_impr", pct(b, a)},
                            {"n_buses_serving", serving[static_cast<std::size_t>(c)]}}}});
    }
    auto f = open_out(out / "heatmap.geojson");
    f << json{{"type", "FeatureCollection"}, {"features", features}}.dump() << "\n";
  }
  {
    json steps = json::array();
    for (const StepLog& s : alloc.log)
      steps.push_back({{"step", s.step},
                       {"area_id", s.area_id},
                       {"station_id", data.network.station(s.station).id},
                       {"buses_after", s.buses_after},
                       {"score", s.area_scores.empty() ? json(nullptr) : json(s.score)},
                       {"area_scores", s.area_scores},
                       {"feasible", s.feasible},
                       {"converged", s.converged},
                       {"assignment_iterations", s.assignment_iterations},
                       {"headway_h", s.headway_h},
                       {"atkinson_after", s.atkinson_after},
                       {"mean_acc_after", s.mean_acc_after}});
    auto f = open_out(out / "allocation_log.json");
    f << steps.dump(2) << "\n";
  }
  {
    ScenarioConfig eff = config;
    eff.gtfs_dir = std::filesystem::absolute(config.resolve(config.gtfs_dir));
    eff.population_file = std::filesystem::absolute(config.resolve(config.population_file));
    eff.output_dir = std::filesystem::absolute(out);
    auto f = open_out(out / "effective_config.json");
    f << eff.to_json().dump(2) << "\n";
  }
  {
    auto f = open_out(out / "grid.csv");
    write_grid_csv(data.grid, f);
  }
  if (config.write_travel_times) {
    auto f = open_out(out / "travel_times.csv");
    write_travel_times_csv(g, planner.travel_times(), f);
  }
  if (config.write_od) {
    auto f = open_out(out / "od.csv");
    write_od_csv(g, planner.od(), f);
  }
}

std::vector<double> with_bottom10(std::vector<double> m) {
  if (std::find(m.begin(), m.end(), 10.0) == m.end()) m.push_back(10.0);
  return m;
}

}  // namespace

json metrics_summary(const ScenarioConfig& config, const ScenarioResult& r) {
  json j;
  j["mode"] = mode_name(config.mode);
  j["seed"] = config.seed ? json(*config.seed) : json(nullptr);
  j["fleet_size"] = config.fleet_size;
  j["study_tiles"] = r.study_tiles;
  j["before"] = report_json(r.before);
  j["after"] = report_json(r.after);
  j["atkinson_reduction_pct"] =
      r.before.atkinson > 0.0 ? 100.0 * (r.before.atkinson - r.after.atkinson) / r.before.atkinson : 0.0;
  const FleetAllocation& alloc = r.allocation;
  json saturated = json::array();
  json buses = json::object();
  int served = 0;
  for (std::size_t a = 0; a < alloc.buses.size(); ++a) {
    if (alloc.buses[a] == 0) continue;
    buses[std::to_string(r.candidate_ids[a])] = alloc.buses[a];
    if (alloc.performance[a].feasible)
      ++served;
    else
      saturated.push_back(r.candidate_ids[a]);
  }
  j["fleet"] = {{"candidate_areas", r.candidate_ids.size()},
                {"terminal_areas", r.terminal_areas},
                {"buses_deployed", alloc.total_buses()},
                {"areas_served", served},
                {"saturated_areas", saturated},
                {"buses_by_area", buses},
                {"steps", alloc.log.size()},
                {"stopped_early", alloc.stopped_early},
                {"note", alloc.note}};
  return j;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const ScenarioData& data,
                            const std::optional<std::filesystem::path>& out) {
  config.validate();
  if (data.candidates.empty()) throw Error(ErrorKind::Infeasible, "no candidate DRT areas in the study area");
  PlannerConfig pc = config.planner;
  pc.drt.tile_length_km = config.tile_length_km;
  Planner planner(data.network, data.grid, data.candidates, pc);

  ScenarioResult r;
  for (const auto& a : data.candidates) r.candidate_ids.push_back(a.id);
  r.terminal_areas = planner.terminal_areas().size();
  r.study_tiles = planner.graph().centroid_count();
  const AccessibilityField before = planner.field();
  r.acc_before = before.acc;
  r.before = inequality_suite(before, config.m_values);
  if (config.mode == PlannerMode::AccEq) {
    r.allocation = allocate_fleet(planner, config.fleet_size);
  } else {
    r.allocation = baseline_random(planner, config.fleet_size, planner.terminal_areas(), *config.seed);
  }
  const AccessibilityField after = planner.field();
  r.acc_after = after.acc;
  r.after = inequality_suite(after, config.m_values);
  if (out) write_artifacts(config, data, planner, r, *out);
  return r;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const ScenarioData data = load_scenario_data(config);
  return run_scenario(config, data, config.resolve(config.output_dir));
}

std::vector<SweepRow> sweep_fleet(const ScenarioConfig& config, const ScenarioData& data,
                                  std::span<const int> fleet_sizes) {
  config.validate();
  if (fleet_sizes.empty()) throw_config("sweep needs at least one fleet size");
  for (std::size_t i = 0; i < fleet_sizes.size(); ++i) {
    if (fleet_sizes[i] < 0) throw_config("sweep fleet sizes must be non-negative");
    if (i > 0 && fleet_sizes[i] <= fleet_sizes[i - 1]) throw_config("sweep fleet sizes must be strictly ascending");
  }
  if (data.candidates.empty()) throw Error(ErrorKind::Infeasible, "no candidate DRT areas in the study area");
  PlannerConfig pc = config.planner;
  pc.drt.tile_length_km = config.tile_length_km;
  Planner planner(data.network, data.grid, data.candidates, pc);
  const std::vector<double> m = with_bottom10(config.m_values);

  std::vector<SweepRow> rows;
  std::size_t next = 0;
  auto capture = [&](int reached, const Planner& p) {
    if (next < fleet_sizes.size() && fleet_sizes[next] == reached) {
      rows.push_back({reached, inequality_suite(p.field(), m)});
      ++next;
    }
  };
  capture(0, planner);
  const StepObserver observe = [&](const StepLog& s, const Planner& p) { capture(s.step, p); };
  const int target = fleet_sizes.back();
  if (config.mode == PlannerMode::AccEq)
    allocate_fleet(planner, target, observe);
  else
    baseline_random(planner, target, planner.terminal_areas(), *config.seed, observe);
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
  out << "N,mean_acc,bottom10_acc,atkinson,theil,pietra,palma\n";
  for (const SweepRow& r : rows) {
    const auto b10 = r.report.bottom_m.find(10.0);
    fmt::print(out, "{},{},{},{},{},{},{}\n", r.fleet_size, r.report.mean,
               b10 == r.report.bottom_m.end() ? 0.0 : b10->second, r.report.atkinson, r.report.theil, r.report.pietra,
               r.report.palma ? fmt::format("{}", *r.report.palma) : std::string());
  }
}

}  // namespace drtplan
