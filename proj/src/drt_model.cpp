#include "drtplan/drt_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "drtplan/error.hpp"

namespace drtplan {

void DrtParams::validate() const {
  if (!(v_drt_kmh > 0.0)) throw_invalid("v_DRT must be positive");
  if (!(tau_stop_h > 0.0)) throw_invalid("tau_s must be positive");
  if (!(tau_terminal_h > 0.0)) throw_invalid("tau_T must be positive");
  if (!(tile_length_km > 0.0)) throw_invalid("tile length must be positive");
  if (K <= 0 || K % 2 != 0) throw_invalid(fmt::format("K must be a positive even number (got {})", K));
  if (!(max_headway_h > 0.0)) throw_invalid("max headway must be positive");
}

PickupCounts pickups_dropoffs(std::span<const TileFlows> flows, double headway_h, double tile_length_km,
                              bool symmetric) {
  if (!(headway_h > 0.0)) throw_invalid("headway must be positive");
  PickupCounts out;
  out.per_tile.reserve(flows.size());
  const double scale = headway_h * tile_length_km * tile_length_km;
  for (const auto& f : flows) {
    if (f.out < 0.0 || f.in < 0.0 || !std::isfinite(f.out) || !std::isfinite(f.in))
      throw_invalid("DRT flows must be non-negative");
    const double n = symmetric ? 2.0 * scale * f.out : scale * (f.out + f.in);
    out.per_tile.push_back(n);
    out.total += n;
  }
  return out;
}

double cycle_length_km(const DrtParams& p, double d_km, double n) {
  const double l = p.tile_length_km;
  return 2.0 * d_km + p.K * l * n / (n + 1.0) + n * l / 3.0 + 4.0 * l / 3.0;
}

double cycle_time_h(const DrtParams& p, double cycle_length_km, double n) {
  return cycle_length_km / p.v_drt_kmh + p.tau_stop_h * n + p.tau_terminal_h;
}

AccessTimes access_times(const DrtParams& p, double d_km, const DrtPerformance& perf) {
  if (!perf.feasible) throw_invalid(fmt::format("area {} has no feasible headway", perf.area_id));
  const std::size_t K = perf.n_tile.size();
  const double line_haul = d_km / p.v_drt_kmh;
  const double in_area = perf.cycle_time_h - 2.0 * line_haul;
  AccessTimes t;
  t.t_in_h.resize(K);
  double downstream = 0.0;  // sum over tiles served after k
  for (std::size_t k = K; k-- > 0;) {
    const double fraction = perf.n_total > 0.0 ? (perf.n_tile[k] / 2.0 + downstream) / perf.n_total : 0.0;
    t.t_in_h[k] = perf.headway_h / 2.0 + fraction * in_area + line_haul;
    downstream += perf.n_tile[k];
  }
  t.t_out_h = t.t_in_h;
  return t;
}

DrtPerformance solve_headway(int area_id, double d_km, std::span<const TileFlows> flows, const DrtParams& p,
                             int buses) {
  p.validate();
  if (buses < 1) throw_invalid("solve_headway needs at least one bus");
  if (d_km < 0.0) throw_invalid("station distance must be non-negative");

  // n(h) is linear in h: n = h * rate.
  const PickupCounts unit = pickups_dropoffs(flows, 1.0, p.tile_length_km, p.symmetric_demand);
  const double rate = unit.total;
  const auto cycle_at = [&](double h) {
    const double n = h * rate;
    return cycle_time_h(p, cycle_length_km(p, d_km, n), n);
  };
  // f is convex with f(0) < 0, so a root in the bracket is unique.
  const auto f = [&](double h) { return h * buses - cycle_at(h); };

  DrtPerformance perf;
  perf.area_id = area_id;
  perf.buses = buses;
  perf.n_tile.assign(flows.size(), 0.0);
  if (f(p.max_headway_h) < 0.0) {
    perf.feasible = false;
    return perf;
  }
  double lo = 0.0;
  double hi = p.max_headway_h;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double h = hi;
  perf.feasible = true;
  perf.headway_h = h;
  for (std::size_t k = 0; k < flows.size(); ++k) perf.n_tile[k] = unit.per_tile[k] * h;
  perf.n_total = rate * h;
  perf.cycle_length_km = cycle_length_km(p, d_km, perf.n_total);
  perf.cycle_time_h = cycle_time_h(p, perf.cycle_length_km, perf.n_total);
  perf.residual_h = std::abs(h * buses - perf.cycle_time_h);
  AccessTimes t = access_times(p, d_km, perf);
  perf.t_in_h = std::move(t.t_in_h);
  perf.t_out_h = std::move(t.t_out_h);
  return perf;
}

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

CycleEstimate simulate_cycle_length(const DrtParams& p, double d_km, int n, int trials, std::uint64_t seed) {
  if (trials < 1) throw_invalid("need at least one trial");
  if (n < 0) throw_invalid("request count must be non-negative");
  const double l = p.tile_length_km;
  const double length = p.K * l / 2.0;
  std::mt19937_64 rng(seed);

  struct Request {
    double x;
    double y;
  };
  std::vector<Request> upper, lower;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    upper.clear();
    lower.clear();
    double x_max = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = unit_uniform(rng) * length;
      const double y = unit_uniform(rng) * 2.0 * l;
      x_max = std::max(x_max, x);
      (y >= l ? upper : lower).push_back({x, y});
    }
    std::sort(upper.begin(), upper.end(), [](const Request& a, const Request& b) { return a.x < b.x; });
    std::sort(lower.begin(), lower.end(), [](const Request& a, const Request& b) { return a.x > b.x; });

    double vertical = 0.0;
    double y = l;  // s_1 sits on the row boundary
    auto visit = [&](double target) {
      vertical += std::abs(target - y);
      y = target;
    };
    if (upper.empty()) visit(1.5 * l);
    for (const auto& r : upper) visit(r.y);
    if (lower.empty()) visit(0.5 * l);
    for (const auto& r : lower) visit(r.y);
    visit(l);

    const double tour = 2.0 * d_km + 2.0 * x_max + vertical;
    sum += tour;
    sum_sq += tour * tour;
  }
  const double mean = sum / trials;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - trials * mean * mean) / (trials - 1)) : 0.0;
  return {mean, std::sqrt(var / trials)};
}

}  // namespace drtplan
