#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace drtplan {

// Continuous-approximation model of one designated DRT area. All times are
// in hours, lengths in km, flows in trips/h/km^2.
struct DrtParams {
  double v_drt_kmh = 25.0;
  double tau_stop_h = 32.0 / 3600.0;     // time lost per pickup/dropoff
  double tau_terminal_h = 1.0 / 60.0;    // terminal dwell at s_A
  double tile_length_km = 1.0;
  int K = 6;
  double max_headway_h = 4.0;            // bisection bracket; beyond it the service is infeasible
  // n(A) = 2 h l^2 sum(phi_out): inbound demand mirrors outbound.
  bool symmetric_demand = false;

  void validate() const;
};

struct TileFlows {
  double out = 0.0;  // first-mile DRT users originating in the tile
  double in = 0.0;   // last-mile DRT users destined to the tile
};

struct PickupCounts {
  double total = 0.0;
  std::vector<double> per_tile;
};

// Expected pickups + dropoffs during one headway.
PickupCounts pickups_dropoffs(std::span<const TileFlows> flows, double headway_h, double tile_length_km,
                              bool symmetric = false);

// Expected cycle length s_A -> s_1 -> serpentine -> s_1 -> s_A.
double cycle_length_km(const DrtParams& p, double d_km, double n);
// Expected cycle duration.
double cycle_time_h(const DrtParams& p, double cycle_length_km, double n);

struct DrtPerformance {
  int area_id = -1;
  int buses = 0;
  bool feasible = false;
  double headway_h = 0.0;
  double n_total = 0.0;
  double cycle_length_km = 0.0;
  double cycle_time_h = 0.0;
  double residual_h = 0.0;  // |h * N_A - C(n(h))|
  std::vector<double> n_tile;
  std::vector<double> t_in_h;   // tile -> s_A
  std::vector<double> t_out_h;  // s_A -> tile
};

// Solves h = C(n(h)) / N_A by bisection on (0, max_headway_h]. Flows are
// given in the area's serving order. Infeasibility (no root in the bracket)
// is reported through DrtPerformance::feasible.
DrtPerformance solve_headway(int area_id, double d_km, std::span<const TileFlows> flows, const DrtParams& p,
                             int buses);

struct AccessTimes {
  std::vector<double> t_in_h;
  std::vector<double> t_out_h;
};

// Per-tile ingress/egress times for a solved area. Throws on an infeasible
// performance.
AccessTimes access_times(const DrtParams& p, double d_km, const DrtPerformance& perf);

struct CycleEstimate {
  double mean_km = 0.0;
  double std_error_km = 0.0;
};

// Monte-Carlo cycle length: n uniform requests in the 2l x (K l / 2) block,
// upper row swept eastbound from s_1 and lower row westbound, no
// backtracking, rectilinear moves. An empty row is still crossed through its
// centre line. Deterministic for a given seed.
CycleEstimate simulate_cycle_length(const DrtParams& p, double d_km, int n, int trials, std::uint64_t seed);

}  // namespace drtplan
