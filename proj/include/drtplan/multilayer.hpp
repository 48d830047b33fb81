#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "drtplan/drt_model.hpp"
#include "drtplan/tessellation.hpp"
#include "drtplan/transit.hpp"

namespace drtplan {

enum class EdgeKind : std::uint8_t {
  Walk,
  Board,       // station -> departing line node, half headway
  Ride,        // departing line node -> arriving line node at the next station
  Dwell,       // stay on board through a stop
  Alight,      // arriving line node -> station
  DrtIngress,  // centroid -> s_A, T_in
  DrtEgress,   // s_A -> centroid, T_out
};

const char* edge_kind_name(EdgeKind k);

struct PathStep {
  EdgeKind kind = EdgeKind::Walk;
  int from = -1;  // graph node ids
  int to = -1;
  double weight_h = 0.0;
};

struct PathResult {
  double duration_h = 0.0;
  std::vector<PathStep> steps;
};

// Shortest travel times between every pair of study centroids, plus the
// per-pair DRT usage bits.
class TravelTimeMatrix {
 public:
  TravelTimeMatrix() = default;
  TravelTimeMatrix(int centroids, int stations);

  int size() const { return m_; }
  double at(int i, int j) const { return time_[idx(i, j)]; }
  bool first_mile(int i, int j) const { return (flags_[idx(i, j)] & kFirst) != 0; }
  bool last_mile(int i, int j) const { return (flags_[idx(i, j)] & kLast) != 0; }
  // Hand-built matrices (analysis, tests). Station labels are left untouched.
  void set(int i, int j, double time_h, bool first_mile = false, bool last_mile = false) {
    time_[idx(i, j)] = time_h;
    flags_[idx(i, j)] = static_cast<std::uint8_t>((first_mile ? kFirst : 0) | (last_mile ? kLast : 0));
  }
  std::span<const double> row(int i) const {
    return {time_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(m_), static_cast<std::size_t>(m_)};
  }

 private:
  friend class MultilayerGraph;
  static constexpr std::uint8_t kFirst = 1;
  static constexpr std::uint8_t kLast = 2;
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(j);
  }

  int m_ = 0;
  int s_ = 0;
  std::vector<double> time_;
  std::vector<std::uint8_t> flags_;
  std::vector<double> station_label_;    // m x s: best arrival at each station from each origin
  std::vector<std::uint8_t> via_drt_;    // m x s: that label starts with a DRT ingress edge
};

// Conventional PT graph plus walking and DRT layers over the study centroids.
//
// Node ids: centroids [0, M), stations [M, M + S), then two nodes per stop of
// every line (arrive, depart). Walking is direct great-circle distance over
// v_walking; centroids are only path endpoints, so walking transfers between
// stations use direct station-to-station edges. DRT edges can only be the
// first edge of a trip (ingress from the origin) or the last (egress into the
// destination), and a trip whose endpoints share an area never uses that
// area's DRT edges.
class MultilayerGraph {
 public:
  MultilayerGraph(const TransitNetwork& network, const TileGrid& grid);

  int centroid_count() const { return static_cast<int>(tile_ids_.size()); }
  int station_count() const { return static_cast<int>(stations_.size()); }
  int node_count() const { return node_count_; }
  int tile_id(int centroid) const { return tile_ids_.at(static_cast<std::size_t>(centroid)); }
  std::optional<int> centroid_of_tile(int tile_id) const;
  int station_node(int station) const { return centroid_count() + station; }
  double intra_tile_time_h() const { return intra_tile_h_; }
  double walk_time_h(int ci, int cj) const;

  // Installs (feasible, N_A >= 1) or removes the DRT edges of an area.
  void set_area_service(const DrtArea& area, const DrtPerformance& perf);
  void clear_area_service(int area_id);
  bool has_area_service(int area_id) const { return services_.count(area_id) != 0; }
  std::size_t drt_edge_count() const;
  std::vector<int> area_centroids(const DrtArea& area) const;

  PathResult shortest_path(int ci, int cj) const;
  double shortest_time(int ci, int cj) const { return shortest_path(ci, cj).duration_h; }

  TravelTimeMatrix all_pairs() const;
  // Recomputes every entry with an endpoint among `centroids`; entries of
  // other pairs cannot depend on DRT edges attached to those centroids.
  void refresh(TravelTimeMatrix& tt, std::span<const int> centroids) const;

 private:
  struct Service {
    int area_id = -1;
    int station = -1;
    std::vector<int> centroids;
    std::vector<double> t_in_h;
    std::vector<double> t_out_h;
  };
  struct Arc {
    int to;
    double weight_h;
    EdgeKind kind;
  };
  struct Search {
    std::vector<double> dist;  // over non-centroid nodes, offset by M
    std::vector<int> pred;     // predecessor node id (may be a centroid for seeds)
    std::vector<EdgeKind> pred_kind;
    std::vector<double> pred_weight;
    std::vector<std::uint8_t> via_drt;
  };
  struct Candidate {
    double time_h;
    int station;  // -1 for direct walk
    bool egress;
  };

  Search search_from(int origin, bool allow_ingress) const;
  Candidate best_arrival(int origin, int dest, std::span<const double> station_labels) const;
  void compute_row(TravelTimeMatrix& tt, int origin) const;
  const Service* service_of(int centroid) const;
  int area_index_of(int centroid) const { return centroid_area_[static_cast<std::size_t>(centroid)]; }

  std::vector<int> tile_ids_;
  std::map<int, int> centroid_index_;
  std::vector<LatLon> centroid_loc_;
  std::vector<LatLon> stations_;
  double walk_kmh_;
  double intra_tile_h_;
  int node_count_ = 0;
  std::vector<std::vector<Arc>> arcs_;  // adjacency over non-centroid nodes (index - M)
  std::vector<double> centroid_station_walk_h_;  // M x S
  std::map<int, Service> services_;
  std::vector<int> centroid_area_;   // area id of an installed service or -1
  std::vector<int> centroid_slot_;   // position within that service's centroid list
};

// Builds the graph and installs every allocated area's DRT edges.
MultilayerGraph assemble(const TransitNetwork& network, const TileGrid& grid, std::span<const DrtArea> areas,
                         std::span<const DrtPerformance> allocations);

struct DrtUsage {
  bool first_mile = false;
  bool last_mile = false;
};

// DRT usage of centroid k (inside `area_centroids`) w.r.t. centroid j: the
// trip k -> j starts with k's DRT ingress, the trip j -> k ends with k's DRT
// egress. Pairs inside the same area never count.
DrtUsage drt_usage(const TravelTimeMatrix& tt, std::span<const int> area_centroids, int k, int j);

// origin_id,dest_id,minutes,used_drt_first,used_drt_last (ids are tile ids)
void write_travel_times_csv(const MultilayerGraph& graph, const TravelTimeMatrix& tt, std::ostream& out);

}  // namespace drtplan
