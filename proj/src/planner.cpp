#include "drtplan/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "drtplan/error.hpp"

namespace drtplan {

std::vector<int> rank_ascending(std::span<const double> values) {
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
  });
  std::vector<int> rank(values.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) rank[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos) + 1;
  return rank;
}

double area_score(std::span<const double> tile_scores, std::span<const int> member_centroids) {
  if (member_centroids.empty()) throw_invalid("area without tiles");
  double s = 0.0;
  for (int c : member_centroids) s += tile_scores[static_cast<std::size_t>(c)];
  return s / static_cast<double>(member_centroids.size());
}

ScoreTable compute_scores(std::span<const double> rho, std::span<const double> acc,
                          std::span<const std::vector<int>> area_centroids, double alpha) {
  if (rho.size() != acc.size()) throw_invalid("rank tables of different sizes");
  ScoreTable t;
  t.alpha = alpha;
  t.rank_rho = rank_ascending(rho);
  t.rank_acc = rank_ascending(acc);
  const int n = static_cast<int>(rho.size());
  t.tile_scores.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) t.tile_scores[i] = tile_score(t.rank_rho[i], t.rank_acc[i], alpha, n);
  t.area_scores.reserve(area_centroids.size());
  for (const auto& members : area_centroids) t.area_scores.push_back(area_score(t.tile_scores, members));
  return t;
}

int FleetAllocation::total_buses() const { return std::accumulate(buses.begin(), buses.end(), 0); }

Planner::Planner(const TransitNetwork& network, const TileGrid& grid, std::vector<DrtArea> candidates,
                 PlannerConfig config)
    : config_(std::move(config)), candidates_(std::move(candidates)), graph_(network, grid) {
  config_.drt.validate();
  config_.demand.validate();
  if (config_.max_assignment_iterations < 1) throw_invalid("assignment iteration cap must be at least 1");
  if (std::abs(config_.drt.tile_length_km - grid.tile_length_km()) > 1e-12)
    throw_invalid("DRT tile length differs from the grid tile length");

  const int M = graph_.centroid_count();
  if (M == 0) throw Error(ErrorKind::Infeasible, "study area is empty");
  const double trip = config_.demand.peak_trip_rate();
  for (int i = 0; i < M; ++i) {
    const Tile& t = grid.tile(graph_.tile_id(i));
    rho_.push_back(t.rho);
    sigma_.push_back(t.sigma);
    phi_.push_back(origin_density(t.rho, trip));
  }
  for (const auto& a : candidates_) {
    if (a.K() != config_.drt.K)
      throw_invalid(fmt::format("area {} has {} tiles, expected K = {}", a.id, a.K(), config_.drt.K));
    area_centroids_.push_back(graph_.area_centroids(a));
    area_terminal_.push_back(network.is_terminal(a.station));
  }
  buses_.assign(candidates_.size(), 0);
  perf_.resize(candidates_.size());
  for (std::size_t a = 0; a < candidates_.size(); ++a) perf_[a].area_id = candidates_[a].id;
  flows_.assign(candidates_.size(), {});
  for (std::size_t a = 0; a < candidates_.size(); ++a) flows_[a].assign(candidates_[a].member_tiles.size(), {});

  tt_ = graph_.all_pairs();
  od_ = gravity_od(phi_, sigma_, tt_, config_.demand.beta_per_min, grid.tile_length_km());
}

std::vector<double> Planner::accessibility() const {
  return tile_accessibility(tt_, sigma_, config_.drt.tile_length_km);
}

AccessibilityField Planner::field() const {
  AccessibilityField f;
  f.acc = accessibility();
  const double area = config_.drt.tile_length_km * config_.drt.tile_length_km;
  f.population.reserve(rho_.size());
  for (double r : rho_) f.population.push_back(r * area);
  return f;
}

ScoreTable Planner::scores() const { return compute_scores(rho_, accessibility(), area_centroids_, config_.alpha); }

std::vector<int> Planner::terminal_areas() const {
  std::vector<int> out;
  for (std::size_t a = 0; a < candidates_.size(); ++a)
    if (area_terminal_[a]) out.push_back(static_cast<int>(a));
  return out;
}

void Planner::update_demand_after_refresh(std::span<const int> centroids, const TravelTimeMatrix& before) {
  const int M = tt_.size();
  std::vector<std::uint8_t> redo(static_cast<std::size_t>(M), 0);
  for (int c : centroids) redo[static_cast<std::size_t>(c)] = 1;
  for (int o = 0; o < M; ++o) {
    if (redo[static_cast<std::size_t>(o)]) continue;
    for (int k : centroids) {
      if (tt_.at(o, k) != before.at(o, k)) {
        redo[static_cast<std::size_t>(o)] = 1;
        break;
      }
    }
  }
  // Any changed T in a row shifts that row's gravity normalizer.
  for (int o = 0; o < M; ++o)
    if (redo[static_cast<std::size_t>(o)])
      gravity_row(od_, o, phi_, sigma_, tt_, config_.demand.beta_per_min, config_.drt.tile_length_km);
}

namespace {

double aggregate(const std::vector<TileFlows>& f, bool out) {
  double s = 0.0;
  for (const auto& x : f) s += out ? x.out : x.in;
  return s;
}

bool stable(double before, double after, double tol) {
  return std::abs(after - before) <= tol * std::abs(before) + 1e-12;
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

AssignmentResult Planner::assign(int area_index, int buses) {
  if (area_index < 0 || static_cast<std::size_t>(area_index) >= candidates_.size())
    throw_invalid(fmt::format("unknown candidate area index {}", area_index));
  if (buses < 1) throw_invalid("assignment needs at least one bus");
  const auto ai = static_cast<std::size_t>(area_index);
  const DrtArea& area = candidates_[ai];
  const std::vector<int>& cents = area_centroids_[ai];
  const double l = config_.drt.tile_length_km;

  AssignmentResult r;
  r.area_id = area.id;
  r.buses = buses;
  buses_[ai] = buses;

  auto apply = [&](const DrtPerformance& perf) {
    const TravelTimeMatrix before = tt_;
    if (perf.feasible)
      graph_.set_area_service(area, perf);
    else
      graph_.clear_area_service(area.id);
    graph_.refresh(tt_, cents);
    update_demand_after_refresh(cents, before);
  };

  std::vector<TileFlows> used;
  int last_sign_out = 0, last_sign_in = 0, alternations = 0;
  for (int it = 0; it < config_.max_assignment_iterations; ++it) {
    std::vector<TileFlows> computed = drt_flows(od_, tt_, cents, l);
    const double out_sum = aggregate(computed, true);
    const double in_sum = aggregate(computed, false);
    r.out_history.push_back(out_sum);
    r.in_history.push_back(in_sum);
    if (it > 0) {
      const double prev_out = aggregate(used, true);
      const double prev_in = aggregate(used, false);
      if (stable(prev_out, out_sum, config_.flow_tolerance) && stable(prev_in, in_sum, config_.flow_tolerance)) {
        r.converged = true;
        break;
      }
      const int so = sign(out_sum - prev_out);
      const int si = sign(in_sum - prev_in);
      if ((so != 0 && last_sign_out != 0 && so != last_sign_out) || (si != 0 && last_sign_in != 0 && si != last_sign_in))
        ++alternations;
      if (so != 0) last_sign_out = so;
      if (si != 0) last_sign_in = si;
      if (alternations >= 2) r.damped = true;
      if (r.damped)
        for (std::size_t k = 0; k < computed.size(); ++k) {
          computed[k].out = 0.5 * (used[k].out + computed[k].out);
          computed[k].in = 0.5 * (used[k].in + computed[k].in);
        }
    }
    used = std::move(computed);
    DrtPerformance perf = solve_headway(area.id, area.d_km, used, config_.drt, buses);
    ++r.iterations;
    if (!perf.feasible) {
      // Saturated: the area leaves the DRT layer.
      apply(perf);
      r.feasible = false;
      r.converged = false;
      r.performance = perf;
      r.flows.assign(cents.size(), {});
      perf_[ai] = perf;
      flows_[ai] = r.flows;
      return r;
    }
    apply(perf);
    r.performance = std::move(perf);
  }
  r.feasible = true;
  r.flows = used;
  perf_[ai] = r.performance;
  flows_[ai] = used;
  return r;
}

AssignmentResult Planner::add_bus(int area_index) {
  if (area_index < 0 || static_cast<std::size_t>(area_index) >= candidates_.size())
    throw_invalid(fmt::format("unknown candidate area index {}", area_index));
  return assign(area_index, buses_[static_cast<std::size_t>(area_index)] + 1);
}

FleetAllocation Planner::snapshot() const {
  FleetAllocation f;
  f.buses = buses_;
  f.performance = perf_;
  f.fleet_size = f.total_buses();
  return f;
}

namespace {

StepLog finish_step(const Planner& planner, int step, int area_index, const AssignmentResult& r) {
  StepLog log;
  log.step = step;
  log.area_index = area_index;
  log.area_id = planner.candidates()[static_cast<std::size_t>(area_index)].id;
  log.station = planner.candidates()[static_cast<std::size_t>(area_index)].station;
  log.buses_after = r.buses;
  log.feasible = r.feasible;
  log.converged = r.converged;
  log.assignment_iterations = r.iterations;
  log.headway_h = r.performance.headway_h;
  const AccessibilityField f = planner.field();
  log.atkinson_after = atkinson(f);
  log.mean_acc_after = mean_accessibility(f);
  return log;
}

}  // namespace

FleetAllocation allocate_fleet(Planner& planner, int fleet_size, const StepObserver& observe) {
  if (fleet_size < 0) throw_invalid("fleet size must be non-negative");
  if (planner.candidates().empty()) throw Error(ErrorKind::Infeasible, "no candidate DRT areas");
  // An area whose assignment saturates leaves the candidate set; its buses
  // stay counted.
  std::vector<bool> saturated(planner.candidates().size(), false);
  std::vector<StepLog> log;
  std::string note;
  for (int step = 1; step <= fleet_size; ++step) {
    const ScoreTable scores = planner.scores();
    int chosen = -1;
    for (std::size_t a = 0; a < scores.area_scores.size(); ++a) {
      if (saturated[a]) continue;
      // Strict comparison: the lowest index (= area id order) wins ties.
      if (chosen < 0 || scores.area_scores[a] > scores.area_scores[static_cast<std::size_t>(chosen)])
        chosen = static_cast<int>(a);
    }
    if (chosen < 0) {
      note = fmt::format("no feasible candidate remaining after step {}", step - 1);
      break;
    }
    const AssignmentResult r = planner.add_bus(chosen);
    if (!r.feasible) saturated[static_cast<std::size_t>(chosen)] = true;
    StepLog entry = finish_step(planner, step, chosen, r);
    entry.score = scores.area_scores[static_cast<std::size_t>(chosen)];
    entry.area_scores = scores.area_scores;
    if (observe) observe(entry, planner);
    log.push_back(std::move(entry));
  }
  FleetAllocation f = planner.snapshot();
  f.fleet_size = fleet_size;
  f.log = std::move(log);
  f.stopped_early = !note.empty();
  f.note = std::move(note);
  return f;
}

FleetAllocation baseline_random(Planner& planner, int fleet_size, std::span<const int> terminal_areas,
                                std::uint64_t seed, const StepObserver& observe) {
  if (fleet_size < 0) throw_invalid("fleet size must be non-negative");
  if (terminal_areas.empty()) throw Error(ErrorKind::Infeasible, "no candidate area is anchored at a line terminal");
  std::mt19937_64 rng(seed);
  std::vector<StepLog> log;
  for (int step = 1; step <= fleet_size; ++step) {
    const int chosen = terminal_areas[static_cast<std::size_t>(rng() % terminal_areas.size())];
    const AssignmentResult r = planner.add_bus(chosen);
    log.push_back(finish_step(planner, step, chosen, r));
    if (observe) observe(log.back(), planner);
  }
  FleetAllocation f = planner.snapshot();
  f.fleet_size = fleet_size;
  f.log = std::move(log);
  return f;
}

}  // namespace drtplan
