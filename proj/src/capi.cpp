#include "drtplan/drtplan.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "drtplan/demand.hpp"
#include "drtplan/drt_model.hpp"
#include "drtplan/error.hpp"
#include "drtplan/metrics.hpp"
#include "drtplan/scenario.hpp"
#include "drtplan/synthetic.hpp"

struct drt_scenario {
  drtplan::ScenarioConfig config;
  std::optional<drtplan::ScenarioData> data;
  std::optional<drtplan::ScenarioResult> result;
};

namespace {

thread_local std::string g_last_error;

drt_status fail(drt_status code, const char* what) {
  g_last_error = what;
  return code;
}

drt_status status_of(drtplan::ErrorKind k) {
  switch (k) {
    case drtplan::ErrorKind::Config: return DRT_ERR_CONFIG;
    case drtplan::ErrorKind::Data: return DRT_ERR_DATA;
    case drtplan::ErrorKind::Infeasible: return DRT_ERR_INFEASIBLE;
    case drtplan::ErrorKind::InvalidArgument: return DRT_ERR_INVALID_ARGUMENT;
  }
  return DRT_ERR_INTERNAL;
}

template <class F>
drt_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return DRT_OK;
  } catch (const drtplan::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(DRT_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DRT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DRT_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void fill(const drtplan::InequalityReport& r, drt_inequality_report* out) {
  out->atkinson = r.atkinson;
  out->theil = r.theil;
  out->pietra = r.pietra;
  out->has_palma = r.palma ? 1 : 0;
  out->palma = r.palma.value_or(0.0);
  out->mean = r.mean;
}

drtplan::DrtParams to_params(const drt_params& p) {
  drtplan::DrtParams d;
  d.v_drt_kmh = p.v_drt_kmh;
  d.tau_stop_h = p.tau_stop_h;
  d.tau_terminal_h = p.tau_terminal_h;
  d.tile_length_km = p.tile_length_km;
  d.K = p.K;
  d.max_headway_h = p.max_headway_h;
  d.symmetric_demand = p.symmetric_demand != 0;
  return d;
}

#define DRT_REQUIRE(cond, msg) \
  if (!(cond)) return fail(DRT_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* drt_version(void) { return DRTPLAN_VERSION; }

const char* drt_last_error(void) { return g_last_error.c_str(); }

void drt_string_free(char* s) { std::free(s); }

drt_status drt_scenario_load(const char* config_path, drt_scenario** out) {
  DRT_REQUIRE(config_path && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<drt_scenario>();
    s->config = drtplan::ScenarioConfig::load(config_path);
    *out = s.release();
  });
}

drt_status drt_scenario_from_json(const char* json_text, const char* base_dir, drt_scenario** out) {
  DRT_REQUIRE(json_text && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      drtplan::throw_config(e.what());
    }
    auto s = std::make_unique<drt_scenario>();
    s->config = drtplan::ScenarioConfig::from_json(j, base_dir ? base_dir : ".");
    *out = s.release();
  });
}

void drt_scenario_free(drt_scenario* s) { delete s; }

drt_status drt_scenario_set_fleet_size(drt_scenario* s, int fleet_size) {
  DRT_REQUIRE(s, "null scenario");
  if (fleet_size < 0) return fail(DRT_ERR_CONFIG, "optimizer.fleet_size must be non-negative");
  s->config.fleet_size = fleet_size;
  s->result.reset();
  return DRT_OK;
}

drt_status drt_scenario_set_alpha(drt_scenario* s, double alpha) {
  DRT_REQUIRE(s, "null scenario");
  if (!(alpha >= 0.0)) return fail(DRT_ERR_CONFIG, "optimizer.alpha must be non-negative");
  s->config.planner.alpha = alpha;
  s->result.reset();
  return DRT_OK;
}

drt_status drt_scenario_set_mode(drt_scenario* s, const char* mode) {
  DRT_REQUIRE(s && mode, "null argument");
  return guarded([&] {
    s->config.mode = drtplan::parse_mode(mode);
    s->result.reset();
  });
}

drt_status drt_scenario_set_seed(drt_scenario* s, uint64_t seed) {
  DRT_REQUIRE(s, "null scenario");
  s->config.seed = seed;
  s->result.reset();
  return DRT_OK;
}

drt_status drt_scenario_set_output_dir(drt_scenario* s, const char* dir) {
  DRT_REQUIRE(s && dir, "null argument");
  // Relative to the caller's working directory, not the config file.
  s->config.output_dir = std::filesystem::absolute(dir);
  return DRT_OK;
}

drt_status drt_scenario_effective_config(const drt_scenario* s, char** json_out) {
  DRT_REQUIRE(s && json_out, "null argument");
  *json_out = nullptr;
  return guarded([&] { *json_out = dup_string(s->config.to_json().dump(2)); });
}

drt_status drt_scenario_run(drt_scenario* s, int write_artifacts) {
  DRT_REQUIRE(s, "null scenario");
  return guarded([&] {
    s->config.validate();
    if (!s->data) s->data = drtplan::load_scenario_data(s->config);
    std::optional<std::filesystem::path> out;
    if (write_artifacts) out = s->config.resolve(s->config.output_dir);
    s->result = drtplan::run_scenario(s->config, *s->data, out);
  });
}

drt_status drt_scenario_metrics_json(const drt_scenario* s, char** json_out) {
  DRT_REQUIRE(s && json_out, "null argument");
  *json_out = nullptr;
  if (!s->result) return fail(DRT_ERR_INVALID_ARGUMENT, "scenario has not been run");
  return guarded([&] { *json_out = dup_string(drtplan::metrics_summary(s->config, *s->result).dump(2)); });
}

drt_status drt_scenario_before(const drt_scenario* s, drt_inequality_report* out) {
  DRT_REQUIRE(s && out, "null argument");
  if (!s->result) return fail(DRT_ERR_INVALID_ARGUMENT, "scenario has not been run");
  fill(s->result->before, out);
  return DRT_OK;
}

drt_status drt_scenario_after(const drt_scenario* s, drt_inequality_report* out) {
  DRT_REQUIRE(s && out, "null argument");
  if (!s->result) return fail(DRT_ERR_INVALID_ARGUMENT, "scenario has not been run");
  fill(s->result->after, out);
  return DRT_OK;
}

drt_status drt_scenario_sweep(drt_scenario* s, const int* fleet_sizes, size_t count, const char* csv_path) {
  DRT_REQUIRE(s && fleet_sizes && csv_path, "null argument");
  return guarded([&] {
    s->config.validate();
    if (!s->data) s->data = drtplan::load_scenario_data(s->config);
    const auto rows = drtplan::sweep_fleet(s->config, *s->data, std::span<const int>(fleet_sizes, count));
    const std::filesystem::path path(csv_path);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) drtplan::throw_data("cannot write '" + path.string() + "'");
    drtplan::write_sweep_csv(rows, f);
  });
}

drt_status drt_trip_rate_peak(double trip_mean_per_day, double t_peak_h, double t_off_peak_h, double ratio_peak,
                              double ratio_off_peak, double* out) {
  DRT_REQUIRE(out, "null argument");
  return guarded([&] {
    *out = drtplan::trip_rate_peak(trip_mean_per_day, t_peak_h, t_off_peak_h, ratio_peak, ratio_off_peak);
  });
}

void drt_default_params(drt_params* out) {
  if (!out) return;
  const drtplan::DrtParams d;
  *out = {d.v_drt_kmh, d.tau_stop_h, d.tau_terminal_h, d.tile_length_km, d.K, d.max_headway_h,
          d.symmetric_demand ? 1 : 0};
}

drt_status drt_solve_headway(const drt_params* p, double d_km, const double* flows_out, const double* flows_in,
                             size_t tiles, int buses, drt_headway_result* out) {
  DRT_REQUIRE(p && out && (tiles == 0 || (flows_out && flows_in)), "null argument");
  return guarded([&] {
    std::vector<drtplan::TileFlows> flows(tiles);
    for (size_t i = 0; i < tiles; ++i) flows[i] = {flows_out[i], flows_in[i]};
    const auto perf = drtplan::solve_headway(0, d_km, flows, to_params(*p), buses);
    *out = {perf.feasible ? 1 : 0, perf.headway_h, perf.n_total, perf.cycle_length_km, perf.cycle_time_h,
            perf.residual_h};
  });
}

drt_status drt_inequality(const double* acc, const double* population, size_t n, drt_inequality_report* out) {
  DRT_REQUIRE(acc && out && n > 0, "empty field");
  return guarded([&] {
    drtplan::AccessibilityField f;
    f.acc.assign(acc, acc + n);
    if (population)
      f.population.assign(population, population + n);
    else
      f.population.assign(n, 1.0);
    fill(drtplan::inequality_suite(f), out);
  });
}

drt_status drt_write_synthetic_city(const char* dir, uint64_t seed, int rows, int cols) {
  DRT_REQUIRE(dir, "null argument");
  return guarded([&] {
    drtplan::SyntheticCityOptions o;
    o.seed = seed;
    o.rows = rows;
    o.cols = cols;
    drtplan::write_synthetic_city(dir, o);
  });
}

}  // extern "C"
