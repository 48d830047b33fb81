#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drtplan/demand.hpp"
#include "drtplan/drt_model.hpp"
#include "drtplan/metrics.hpp"
#include "drtplan/multilayer.hpp"
#include "drtplan/tessellation.hpp"
#include "drtplan/transit.hpp"

namespace drtplan {

// Ascending 1-based ranks; equal values ranked by index.
std::vector<int> rank_ascending(std::span<const double> values);

// Score(c) = Rank(rho) + alpha * (|C| - Rank(acc)).
inline double tile_score(int rank_rho, int rank_acc, double alpha, int tile_count) {
  return rank_rho + alpha * (tile_count - rank_acc);
}

// Mean member score.
double area_score(std::span<const double> tile_scores, std::span<const int> member_centroids);

struct ScoreTable {
  double alpha = 1.0;
  std::vector<int> rank_rho;
  std::vector<int> rank_acc;
  std::vector<double> tile_scores;
  std::vector<double> area_scores;  // per candidate index
};

ScoreTable compute_scores(std::span<const double> rho, std::span<const double> acc,
                          std::span<const std::vector<int>> area_centroids, double alpha);

struct PlannerConfig {
  DrtParams drt;
  DemandParams demand;
  double alpha = 1.0;
  int max_assignment_iterations = 50;
  double flow_tolerance = 0.05;  // relative change of aggregate DRT flows
};

struct AssignmentResult {
  int area_id = -1;
  int buses = 0;
  int iterations = 0;  // headway solves
  bool converged = false;
  bool feasible = false;
  bool damped = false;
  std::vector<TileFlows> flows;
  DrtPerformance performance;
  std::vector<double> out_history;  // aggregate first-mile flow per iteration
  std::vector<double> in_history;
};

struct StepLog {
  int step = 0;
  int area_index = -1;
  int area_id = -1;
  int station = -1;
  int buses_after = 0;
  double score = 0.0;
  std::vector<double> area_scores;  // empty for the random baseline
  bool feasible = false;
  bool converged = false;
  int assignment_iterations = 0;
  double headway_h = 0.0;
  double atkinson_after = 0.0;
  double mean_acc_after = 0.0;
};

struct FleetAllocation {
  std::vector<int> buses;  // per candidate index
  std::vector<DrtPerformance> performance;
  std::vector<StepLog> log;
  int fleet_size = 0;
  bool stopped_early = false;
  std::string note;

  int total_buses() const;
};

// Mutable planning state: the multilayer graph, travel times, demand and the
// current fleet. The conventional-only state is captured at construction.
class Planner {
 public:
  Planner(const TransitNetwork& network, const TileGrid& grid, std::vector<DrtArea> candidates,
          PlannerConfig config);

  const PlannerConfig& config() const { return config_; }
  const std::vector<DrtArea>& candidates() const { return candidates_; }
  const MultilayerGraph& graph() const { return graph_; }
  const TravelTimeMatrix& travel_times() const { return tt_; }
  const OdMatrix& od() const { return od_; }
  std::span<const double> rho() const { return rho_; }
  std::span<const double> sigma() const { return sigma_; }
  std::span<const double> phi() const { return phi_; }
  std::span<const int> area_centroids(int area_index) const { return area_centroids_.at(static_cast<std::size_t>(area_index)); }
  int buses(int area_index) const { return buses_.at(static_cast<std::size_t>(area_index)); }
  const DrtPerformance& performance(int area_index) const { return perf_.at(static_cast<std::size_t>(area_index)); }
  const std::vector<TileFlows>& flows(int area_index) const { return flows_.at(static_cast<std::size_t>(area_index)); }

  std::vector<double> accessibility() const;
  AccessibilityField field() const;
  ScoreTable scores() const;

  // Transit assignment within one area for `buses` vehicles: alternates DRT
  // flows, the headway fixed point and the travel-time / demand update until
  // aggregate flows move by at most the tolerance.
  AssignmentResult assign(int area_index, int buses);
  // Adds one bus to an area and runs the assignment.
  AssignmentResult add_bus(int area_index);

  FleetAllocation snapshot() const;
  std::vector<int> terminal_areas() const;

 private:
  void update_demand_after_refresh(std::span<const int> centroids, const TravelTimeMatrix& before);

  PlannerConfig config_;
  std::vector<DrtArea> candidates_;
  std::vector<std::vector<int>> area_centroids_;
  std::vector<bool> area_terminal_;
  MultilayerGraph graph_;
  TravelTimeMatrix tt_;
  OdMatrix od_;
  std::vector<double> rho_;
  std::vector<double> sigma_;
  std::vector<double> phi_;
  std::vector<int> buses_;
  std::vector<DrtPerformance> perf_;
  std::vector<std::vector<TileFlows>> flows_;
};

// Greedy upper level: N times, rescore from the current accessibility, give a
// bus to the best-scoring area (ties: lowest id) and rerun its assignment.
// Areas that saturate are skipped afterwards; with none left the run stops
// early and says so in FleetAllocation::note.
// Called after every step with the planner state reached by that step.
using StepObserver = std::function<void(const StepLog&, const Planner&)>;

FleetAllocation allocate_fleet(Planner& planner, int fleet_size, const StepObserver& observe = {});

// Random baseline over terminal-station areas, one bus at a time.
FleetAllocation baseline_random(Planner& planner, int fleet_size, std::span<const int> terminal_areas,
                                std::uint64_t seed, const StepObserver& observe = {});

}  // namespace drtplan
