/* C interface of the drtplan library. All functions are thread-compatible:
 * distinct handles may be used from distinct threads; the last error string
 * is per thread. Strings returned through char** are owned by the caller and
 * released with drt_string_free. */
#ifndef DRTPLAN_DRTPLAN_H
#define DRTPLAN_DRTPLAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DRTPLAN_BUILDING_LIBRARY)
#    define DRTPLAN_API __declspec(dllexport)
#  else
#    define DRTPLAN_API __declspec(dllimport)
#  endif
#else
#  define DRTPLAN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drt_status {
  DRT_OK = 0,
  DRT_ERR_CONFIG = 1,
  DRT_ERR_DATA = 2,
  DRT_ERR_INFEASIBLE = 3,
  DRT_ERR_INVALID_ARGUMENT = 4,
  DRT_ERR_INTERNAL = 5
} drt_status;

typedef struct drt_scenario drt_scenario;

typedef struct drt_params {
  double v_drt_kmh;
  double tau_stop_h;
  double tau_terminal_h;
  double tile_length_km;
  int K;
  double max_headway_h;
  int symmetric_demand;
} drt_params;

typedef struct drt_headway_result {
  int feasible;
  double headway_h;
  double n_total;
  double cycle_length_km;
  double cycle_time_h;
  double residual_h;
} drt_headway_result;

typedef struct drt_inequality_report {
  double atkinson;
  double theil;
  double pietra;
  double palma; /* valid when has_palma */
  int has_palma;
  double mean;
} drt_inequality_report;

DRTPLAN_API const char* drt_version(void);
/* Message of the last failed call on this thread, "" if none. */
DRTPLAN_API const char* drt_last_error(void);
DRTPLAN_API void drt_string_free(char* s);

/* Scenario lifecycle. Relative paths in a JSON text resolve against base_dir. */
DRTPLAN_API drt_status drt_scenario_load(const char* config_path, drt_scenario** out);
DRTPLAN_API drt_status drt_scenario_from_json(const char* json_text, const char* base_dir, drt_scenario** out);
DRTPLAN_API void drt_scenario_free(drt_scenario* s);

DRTPLAN_API drt_status drt_scenario_set_fleet_size(drt_scenario* s, int fleet_size);
DRTPLAN_API drt_status drt_scenario_set_alpha(drt_scenario* s, double alpha);
/* "acceq" or "baseline" */
DRTPLAN_API drt_status drt_scenario_set_mode(drt_scenario* s, const char* mode);
DRTPLAN_API drt_status drt_scenario_set_seed(drt_scenario* s, uint64_t seed);
DRTPLAN_API drt_status drt_scenario_set_output_dir(drt_scenario* s, const char* dir);
DRTPLAN_API drt_status drt_scenario_effective_config(const drt_scenario* s, char** json_out);

/* Runs the scenario; artifacts are written to the output directory when
 * write_artifacts is non-zero. The summary stays available on the handle. */
DRTPLAN_API drt_status drt_scenario_run(drt_scenario* s, int write_artifacts);
DRTPLAN_API drt_status drt_scenario_metrics_json(const drt_scenario* s, char** json_out);
DRTPLAN_API drt_status drt_scenario_before(const drt_scenario* s, drt_inequality_report* out);
DRTPLAN_API drt_status drt_scenario_after(const drt_scenario* s, drt_inequality_report* out);
/* Ascending fleet sizes; CSV N,mean_acc,bottom10_acc,atkinson,theil,pietra,palma. */
DRTPLAN_API drt_status drt_scenario_sweep(drt_scenario* s, const int* fleet_sizes, size_t count, const char* csv_path);

/* Stateless helpers. */
DRTPLAN_API drt_status drt_trip_rate_peak(double trip_mean_per_day, double t_peak_h, double t_off_peak_h,
                                          double ratio_peak, double ratio_off_peak, double* out);
DRTPLAN_API void drt_default_params(drt_params* out);
/* flows_out/flows_in: per tile, in serving order, trips/h/km^2. */
DRTPLAN_API drt_status drt_solve_headway(const drt_params* p, double d_km, const double* flows_out,
                                         const double* flows_in, size_t tiles, int buses, drt_headway_result* out);
DRTPLAN_API drt_status drt_inequality(const double* acc, const double* population, size_t n,
                                      drt_inequality_report* out);
DRTPLAN_API drt_status drt_write_synthetic_city(const char* dir, uint64_t seed, int rows, int cols);

#ifdef __cplusplus
}
#endif

#endif
