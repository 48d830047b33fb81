#include "drtplan/multilayer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <queue>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "drtplan/error.hpp"

namespace drtplan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Walk: return "walk";
    case EdgeKind::Board: return "board";
    case EdgeKind::Ride: return "ride";
    case EdgeKind::Dwell: return "dwell";
    case EdgeKind::Alight: return "alight";
    case EdgeKind::DrtIngress: return "drt_ingress";
    case EdgeKind::DrtEgress: return "drt_egress";
  }
  return "?";
}

TravelTimeMatrix::TravelTimeMatrix(int centroids, int stations)
    : m_(centroids),
      s_(stations),
      time_(static_cast<std::size_t>(centroids) * static_cast<std::size_t>(centroids), 0.0),
      flags_(time_.size(), 0),
      station_label_(static_cast<std::size_t>(centroids) * static_cast<std::size_t>(stations), kInf),
      via_drt_(station_label_.size(), 0) {}

MultilayerGraph::MultilayerGraph(const TransitNetwork& network, const TileGrid& grid)
    : tile_ids_(grid.study_tiles()),
      stations_(network.station_locations()),
      walk_kmh_(network.walking_speed_kmh()),
      intra_tile_h_(grid.tile_length_km() / network.walking_speed_kmh()) {
  const int M = centroid_count();
  const int S = station_count();
  for (int i = 0; i < M; ++i) {
    centroid_index_.emplace(tile_ids_[static_cast<std::size_t>(i)], i);
    centroid_loc_.push_back(grid.tile(tile_ids_[static_cast<std::size_t>(i)]).centroid);
  }
  centroid_area_.assign(static_cast<std::size_t>(M), -1);
  centroid_slot_.assign(static_cast<std::size_t>(M), -1);

  centroid_station_walk_h_.resize(static_cast<std::size_t>(M) * static_cast<std::size_t>(S));
  for (int i = 0; i < M; ++i)
    for (int s = 0; s < S; ++s)
      centroid_station_walk_h_[static_cast<std::size_t>(i) * S + s] =
          great_circle_km(centroid_loc_[static_cast<std::size_t>(i)], stations_[static_cast<std::size_t>(s)]) /
          walk_kmh_;

  std::size_t line_nodes = 0;
  for (const auto& l : network.lines()) line_nodes += 2 * l.stations.size();
  arcs_.resize(static_cast<std::size_t>(S) + line_nodes);
  node_count_ = M + static_cast<int>(arcs_.size());

  for (int s = 0; s < S; ++s)
    for (int t = 0; t < S; ++t)
      if (s != t)
        arcs_[static_cast<std::size_t>(s)].push_back(
            {M + t, great_circle_km(stations_[static_cast<std::size_t>(s)], stations_[static_cast<std::size_t>(t)]) /
                        walk_kmh_,
             EdgeKind::Walk});

  int base = S;  // local index of the line's first node
  for (const auto& line : network.lines()) {
    const int n = static_cast<int>(line.stations.size());
    const double wait_h = boarding_wait_min(line) / 60.0;
    for (int j = 0; j < n; ++j) {
      const int station = line.stations[static_cast<std::size_t>(j)];
      const int arr = base + 2 * j;
      const int dep = arr + 1;
      if (j + 1 < n) {
        arcs_[static_cast<std::size_t>(station)].push_back({M + dep, wait_h, EdgeKind::Board});
        arcs_[static_cast<std::size_t>(dep)].push_back(
            {M + arr + 2, line.run_min[static_cast<std::size_t>(j)] / 60.0, EdgeKind::Ride});
      }
      if (j > 0) {
        arcs_[static_cast<std::size_t>(arr)].push_back({M + station, 0.0, EdgeKind::Alight});
        if (j + 1 < n)
          arcs_[static_cast<std::size_t>(arr)].push_back(
              {M + dep, line.dwell_min[static_cast<std::size_t>(j)] / 60.0, EdgeKind::Dwell});
      }
    }
    base += 2 * n;
  }
}

std::optional<int> MultilayerGraph::centroid_of_tile(int tile_id) const {
  auto it = centroid_index_.find(tile_id);
  if (it == centroid_index_.end()) return std::nullopt;
  return it->second;
}

double MultilayerGraph::walk_time_h(int ci, int cj) const {
  if (ci == cj) return intra_tile_h_;
  return great_circle_km(centroid_loc_[static_cast<std::size_t>(ci)], centroid_loc_[static_cast<std::size_t>(cj)]) /
         walk_kmh_;
}

std::vector<int> MultilayerGraph::area_centroids(const DrtArea& area) const {
  std::vector<int> out;
  out.reserve(area.member_tiles.size());
  for (int tile : area.member_tiles) {
    auto c = centroid_of_tile(tile);
    if (!c) throw_invalid(fmt::format("area {}: tile {} is outside the study area", area.id, tile));
    out.push_back(*c);
  }
  return out;
}

void MultilayerGraph::clear_area_service(int area_id) {
  auto it = services_.find(area_id);
  if (it == services_.end()) return;
  for (int c : it->second.centroids) {
    centroid_area_[static_cast<std::size_t>(c)] = -1;
    centroid_slot_[static_cast<std::size_t>(c)] = -1;
  }
  services_.erase(it);
}

void MultilayerGraph::set_area_service(const DrtArea& area, const DrtPerformance& perf) {
  clear_area_service(area.id);
  if (!perf.feasible || perf.buses < 1) return;
  if (area.station < 0 || area.station >= station_count())
    throw_invalid(fmt::format("area {} references unknown station {}", area.id, area.station));
  if (perf.t_in_h.size() != area.member_tiles.size() || perf.t_out_h.size() != area.member_tiles.size())
    throw_invalid(fmt::format("area {}: access times do not match the area size", area.id));
  Service svc;
  svc.area_id = area.id;
  svc.station = area.station;
  svc.centroids = area_centroids(area);
  svc.t_in_h = perf.t_in_h;
  svc.t_out_h = perf.t_out_h;
  for (std::size_t k = 0; k < svc.centroids.size(); ++k) {
    const auto c = static_cast<std::size_t>(svc.centroids[k]);
    if (centroid_area_[c] != -1)
      throw_invalid(fmt::format("tile {} already belongs to DRT area {}", tile_ids_[c], centroid_area_[c]));
    if (!(svc.t_in_h[k] >= 0.0) || !(svc.t_out_h[k] >= 0.0) || !std::isfinite(svc.t_in_h[k]) ||
        !std::isfinite(svc.t_out_h[k]))
      throw_invalid(fmt::format("area {}: DRT edge weights must be finite and non-negative", area.id));
  }
  for (std::size_t k = 0; k < svc.centroids.size(); ++k) {
    const auto c = static_cast<std::size_t>(svc.centroids[k]);
    centroid_area_[c] = area.id;
    centroid_slot_[c] = static_cast<int>(k);
  }
  services_.emplace(area.id, std::move(svc));
}

std::size_t MultilayerGraph::drt_edge_count() const {
  std::size_t n = 0;
  for (const auto& [id, svc] : services_) n += 2 * svc.centroids.size();
  return n;
}

const MultilayerGraph::Service* MultilayerGraph::service_of(int centroid) const {
  const int area = area_index_of(centroid);
  if (area < 0) return nullptr;
  return &services_.at(area);
}

MultilayerGraph::Search MultilayerGraph::search_from(int origin, bool allow_ingress) const {
  const int M = centroid_count();
  const int S = station_count();
  const std::size_t n = arcs_.size();
  Search r{std::vector<double>(n, kInf), std::vector<int>(n, -1), std::vector<EdgeKind>(n, EdgeKind::Walk),
           std::vector<double>(n, 0.0), std::vector<std::uint8_t>(n, 0)};

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int s = 0; s < S; ++s) {
    r.dist[static_cast<std::size_t>(s)] = centroid_station_walk_h_[static_cast<std::size_t>(origin) * S + s];
    r.pred[static_cast<std::size_t>(s)] = origin;
    r.pred_weight[static_cast<std::size_t>(s)] = r.dist[static_cast<std::size_t>(s)];
  }
  if (allow_ingress) {
    if (const Service* svc = service_of(origin)) {
      const double t_in = svc->t_in_h[static_cast<std::size_t>(centroid_slot_[static_cast<std::size_t>(origin)])];
      const auto s = static_cast<std::size_t>(svc->station);
      if (t_in < r.dist[s]) {
        r.dist[s] = t_in;
        r.pred_kind[s] = EdgeKind::DrtIngress;
        r.pred_weight[s] = t_in;
        r.via_drt[s] = 1;
      }
    }
  }
  for (int s = 0; s < S; ++s) queue.emplace(r.dist[static_cast<std::size_t>(s)], s);

  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > r.dist[static_cast<std::size_t>(u)]) continue;
    for (const Arc& a : arcs_[static_cast<std::size_t>(u)]) {
      const auto v = static_cast<std::size_t>(a.to - M);
      const double nd = d + a.weight_h;
      if (nd < r.dist[v]) {
        r.dist[v] = nd;
        r.pred[v] = u + M;
        r.pred_kind[v] = a.kind;
        r.pred_weight[v] = a.weight_h;
        r.via_drt[v] = r.via_drt[static_cast<std::size_t>(u)];
        queue.emplace(nd, static_cast<int>(v));
      }
    }
  }
  return r;
}

MultilayerGraph::Candidate MultilayerGraph::best_arrival(int origin, int dest,
                                                         std::span<const double> labels) const {
  const int S = station_count();
  Candidate best{walk_time_h(origin, dest), -1, false};
  const double* walk = &centroid_station_walk_h_[static_cast<std::size_t>(dest) * S];
  for (int s = 0; s < S; ++s) {
    const double t = labels[static_cast<std::size_t>(s)] + walk[s];
    if (t < best.time_h) best = {t, s, false};
  }
  if (const Service* svc = service_of(dest)) {
    if (area_index_of(origin) != svc->area_id) {
      const double t = labels[static_cast<std::size_t>(svc->station)] +
                       svc->t_out_h[static_cast<std::size_t>(centroid_slot_[static_cast<std::size_t>(dest)])];
      if (t < best.time_h) best = {t, svc->station, true};
    }
  }
  return best;
}

void MultilayerGraph::compute_row(TravelTimeMatrix& tt, int origin) const {
  const int M = centroid_count();
  const int S = station_count();
  const Search with_drt = search_from(origin, true);
  std::optional<Search> plain;
  if (service_of(origin)) plain = search_from(origin, false);

  std::copy_n(with_drt.dist.begin(), S, tt.station_label_.begin() + static_cast<std::ptrdiff_t>(origin) * S);
  std::copy_n(with_drt.via_drt.begin(), S, tt.via_drt_.begin() + static_cast<std::ptrdiff_t>(origin) * S);

  const int own_area = area_index_of(origin);
  for (int d = 0; d < M; ++d) {
    const std::size_t cell = tt.idx(origin, d);
    if (d == origin) {
      tt.time_[cell] = intra_tile_h_;
      tt.flags_[cell] = 0;
      continue;
    }
    const bool same_area = own_area >= 0 && area_index_of(d) == own_area;
    const Search& s = same_area ? *plain : with_drt;
    const Candidate c = best_arrival(origin, d, std::span<const double>(s.dist.data(), static_cast<std::size_t>(S)));
    tt.time_[cell] = c.time_h;
    std::uint8_t f = 0;
    if (c.station >= 0 && s.via_drt[static_cast<std::size_t>(c.station)]) f |= TravelTimeMatrix::kFirst;
    if (c.egress) f |= TravelTimeMatrix::kLast;
    tt.flags_[cell] = f;
  }
}

TravelTimeMatrix MultilayerGraph::all_pairs() const {
  TravelTimeMatrix tt(centroid_count(), station_count());
  for (int o = 0; o < centroid_count(); ++o) compute_row(tt, o);
  return tt;
}

void MultilayerGraph::refresh(TravelTimeMatrix& tt, std::span<const int> centroids) const {
  const int M = centroid_count();
  const int S = station_count();
  if (tt.m_ != M || tt.s_ != S) throw_invalid("travel-time matrix does not match the graph");
  std::vector<std::uint8_t> in_set(static_cast<std::size_t>(M), 0);
  std::set<int> touched_areas;
  for (int c : centroids) {
    in_set[static_cast<std::size_t>(c)] = 1;
    if (area_index_of(c) >= 0) touched_areas.insert(area_index_of(c));
  }
  // Rows of the touched centroids and of their current area mates.
  std::vector<std::uint8_t> full_row = in_set;
  for (int o = 0; o < M; ++o)
    if (touched_areas.count(area_index_of(o))) full_row[static_cast<std::size_t>(o)] = 1;
  for (int o = 0; o < M; ++o)
    if (full_row[static_cast<std::size_t>(o)]) compute_row(tt, o);

  for (int o = 0; o < M; ++o) {
    if (full_row[static_cast<std::size_t>(o)]) continue;
    const std::span<const double> labels(tt.station_label_.data() + static_cast<std::size_t>(o) * S,
                                         static_cast<std::size_t>(S));
    for (int d : centroids) {
      const Candidate c = best_arrival(o, d, labels);
      const std::size_t cell = tt.idx(o, d);
      tt.time_[cell] = c.time_h;
      std::uint8_t f = 0;
      if (c.station >= 0 && tt.via_drt_[static_cast<std::size_t>(o) * S + static_cast<std::size_t>(c.station)])
        f |= TravelTimeMatrix::kFirst;
      if (c.egress) f |= TravelTimeMatrix::kLast;
      tt.flags_[cell] = f;
    }
  }
}

PathResult MultilayerGraph::shortest_path(int ci, int cj) const {
  const int M = centroid_count();
  if (ci < 0 || ci >= M || cj < 0 || cj >= M) throw_invalid("centroid index out of range");
  PathResult out;
  if (ci == cj) {
    out.duration_h = intra_tile_h_;
    out.steps.push_back({EdgeKind::Walk, ci, cj, intra_tile_h_});
    return out;
  }
  const bool same_area = area_index_of(ci) >= 0 && area_index_of(ci) == area_index_of(cj);
  const Search s = search_from(ci, !same_area);
  const Candidate c =
      best_arrival(ci, cj, std::span<const double>(s.dist.data(), static_cast<std::size_t>(station_count())));
  if (!std::isfinite(c.time_h)) throw_invalid("destination unreachable");
  out.duration_h = c.time_h;
  if (c.station < 0) {
    out.steps.push_back({EdgeKind::Walk, ci, cj, c.time_h});
    return out;
  }
  std::vector<PathStep> rev;
  if (c.egress) {
    const Service* svc = service_of(cj);
    rev.push_back({EdgeKind::DrtEgress, M + c.station, cj,
                   svc->t_out_h[static_cast<std::size_t>(centroid_slot_[static_cast<std::size_t>(cj)])]});
  } else {
    rev.push_back({EdgeKind::Walk, M + c.station, cj,
                   centroid_station_walk_h_[static_cast<std::size_t>(cj) * station_count() + c.station]});
  }
  int node = c.station;  // local index
  while (true) {
    const auto u = static_cast<std::size_t>(node);
    const int pred = s.pred[u];
    rev.push_back({s.pred_kind[u], pred, node + M, s.pred_weight[u]});
    if (pred < M) break;
    node = pred - M;
  }
  out.steps.assign(rev.rbegin(), rev.rend());
  return out;
}

MultilayerGraph assemble(const TransitNetwork& network, const TileGrid& grid, std::span<const DrtArea> areas,
                         std::span<const DrtPerformance> allocations) {
  MultilayerGraph g(network, grid);
  for (const auto& perf : allocations) {
    auto it = std::find_if(areas.begin(), areas.end(), [&](const DrtArea& a) { return a.id == perf.area_id; });
    if (it == areas.end()) throw_invalid(fmt::format("allocation references unknown area {}", perf.area_id));
    g.set_area_service(*it, perf);
  }
  return g;
}

DrtUsage drt_usage(const TravelTimeMatrix& tt, std::span<const int> area_centroids, int k, int j) {
  if (std::find(area_centroids.begin(), area_centroids.end(), k) == area_centroids.end())
    throw_invalid(fmt::format("centroid {} is not in the area", k));
  if (std::find(area_centroids.begin(), area_centroids.end(), j) != area_centroids.end()) return {};
  return {tt.first_mile(k, j), tt.last_mile(j, k)};
}

void write_travel_times_csv(const MultilayerGraph& graph, const TravelTimeMatrix& tt, std::ostream& out) {
  out << "origin_id,dest_id,minutes,used_drt_first,used_drt_last\n";
  for (int i = 0; i < tt.size(); ++i)
    for (int j = 0; j < tt.size(); ++j)
      fmt::print(out, "{},{},{:.6f},{},{}\n", graph.tile_id(i), graph.tile_id(j), tt.at(i, j) * 60.0,
                 tt.first_mile(i, j) ? 1 : 0, tt.last_mile(i, j) ? 1 : 0);
}

}  // namespace drtplan
