// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "drtplan/demand.hpp"
#include "drtplan/drt_model.hpp"
#include "drtplan/metrics.hpp"
#include "drtplan/multilayer.hpp"
#include "drtplan/planner.hpp"
#include "drtplan/scenario.hpp"
#include "drtplan/synthetic.hpp"

using namespace drtplan;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { Pass, Fail, Skip } kind = Pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {Outcome::Fail, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.kind == Outcome::Pass && budget_s > 0.0 && secs > budget_s) {
    o.kind = Outcome::Fail;
    o.detail += fmt::format("; over budget {:.0f} s", budget_s);
  }
  const char* tag = o.kind == Outcome::Pass ? "PASS" : o.kind == Outcome::Fail ? "FAIL" : "SKIP";
  if (o.kind == Outcome::Fail) ++failures;
  fmt::print("{} [{}] {} ({:.2f} s): {}\n", tag, id, name, secs, o.detail);
  std::fflush(stdout);
}

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

AccessibilityField unweighted(const std::vector<double>& v) {
  AccessibilityField f;
  f.acc = v;
  f.population.assign(v.size(), 1.0);
  return f;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("drtplan_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// The default 10 x 10 synthetic city written to disk, with its config.
ScenarioConfig synthetic_config(const std::string& name) {
  const fs::path dir = scratch(name);
  write_synthetic_city(dir);
  ScenarioConfig c = ScenarioConfig::load(dir / "scenario.json");
  c.output_dir = dir / "out";
  return c;
}

// Independent bisection of h * N = C(2 * phi * h) from the raw formulas.
double oracle_headway(double phi_total, int buses, double d, double l, int K, double v, double tau_s, double tau_t) {
  auto C = [&](double n) {
    const double cl = 2 * d + K * l * n / (n + 1) + n * l / 3 + 4 * l / 3;
    return cl / v + tau_s * n + tau_t;
  };
  auto g = [&](double h) { return h * buses - C(2 * phi_total * h); };
  double lo = 0.0, hi = 4.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct City {
  TileGrid grid;
  TransitNetwork network;
  std::vector<DrtArea> areas;
};

City synthetic_city_data() {
  SyntheticCity s = make_synthetic_city();
  City c;
  const auto st = s.network.station_locations();
  c.grid = filter_study_area(build_grid(s.bbox, 1.0, s.population), st, 5.0);
  c.areas = partition_drt_areas(c.grid, st, 6);
  c.network = std::move(s.network);
  return c;
}

}  // namespace

int main() {
  criterion(1, "trip-rate derivation", 1.0, [] {
    const double r = trip_rate_peak(1.32, 5.5, 8.5, 10.0, 3.0);
    return verdict(std::abs(r - 0.164) <= 0.005, fmt::format("rate = {:.6f}, target 0.164 +/- 0.005", r));
  });

  criterion(2, "continuous-approximation cycle length vs Monte Carlo", 30.0, [] {
    const DrtParams p;
    bool ok = true;
    std::string detail;
    for (int n : {1, 5, 20}) {
      const CycleEstimate mc = simulate_cycle_length(p, 2.0, n, 100000, 20240 + n);
      const double eq = cycle_length_km(p, 2.0, n);
      const double rel = std::abs(mc.mean_km - eq) / eq;
      ok = ok && rel < 0.05;
      detail += fmt::format("n={}: mc {:.4f} eq {:.4f} rel {:.4f}; ", n, mc.mean_km, eq, rel);
    }
    return verdict(ok, detail + "limit 0.05");
  });

  criterion(3, "headway fixed point on the worked example", 1.0, [] {
    DrtParams p;
    p.symmetric_demand = true;
    const std::vector<TileFlows> flows(6, TileFlows{5.0, 0.0});
    const DrtPerformance perf = solve_headway(0, 2.0, flows, p, 2);
    const double oracle = oracle_headway(30.0, 2, 2.0, 1.0, 6, 25.0, 32.0 / 3600.0, 1.0 / 60.0);
    const bool ok = perf.feasible && std::abs(perf.n_total - 41.8) <= 0.2 && std::abs(perf.headway_h - 0.697) <= 0.003 &&
                    perf.residual_h < 1e-6 && std::abs(perf.headway_h - oracle) <= 1e-6;
    return verdict(ok, fmt::format("n = {:.4f}, h = {:.6f} h, residual {:.2e}, oracle h = {:.9f}", perf.n_total,
                                   perf.headway_h, perf.residual_h, oracle));
  });

  criterion(4, "inequality index suite", 5.0, [] {
    bool ok = true;
    std::string detail;
    auto check = [&](const char* what, double got, double want, double tol) {
      const bool pass = std::abs(got - want) <= tol;
      ok = ok && pass;
      if (!pass) detail += fmt::format("{} = {:.6g} (want {:.6g}); ", what, got, want);
    };
    const auto two = unweighted({1.0, 3.0});
    check("Atkinson{1,3}", atkinson(two), 0.25, 1e-12);
    check("Theil{1,3}", theil(two), 0.1308, 1e-4);
    check("Pietra{1,3}", pietra(two), 0.25, 1e-12);
    std::vector<double> ten(9, 1.0);
    ten.push_back(10.0);
    check("Palma(nine 1 + one 10)", palma(unweighted(ten)).value_or(-1.0), 2.5, 0.0);
    const auto flat = unweighted(std::vector<double>(20, 7.0));
    check("uniform Atkinson", atkinson(flat), 0.0, 1e-12);
    check("uniform Theil", theil(flat), 0.0, 1e-12);
    check("uniform Pietra", pietra(flat), 0.0, 1e-12);
    check("uniform Palma", palma(flat).value_or(-1.0), 1.0, 1e-12);

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(1.0, 100.0);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v(100);
      for (double& x : v) x = u(rng);
      double mu = 0.0;
      for (double x : v) mu += x;
      mu /= 100.0;
      std::size_t rich = 0, poor = 0;
      do rich = rng() % 100; while (!(v[rich] > mu));
      do poor = rng() % 100; while (!(v[poor] < mu));
      const double delta = 0.5 * std::min(v[rich] - mu, mu - v[poor]);
      const auto before = unweighted(v);
      v[rich] -= delta;
      v[poor] += delta;
      const auto after = unweighted(v);
      if (!(atkinson(after) < atkinson(before))) ++violations;
      if (!(theil(after) < theil(before))) ++violations;
      if (!(pietra(after) < pietra(before))) ++violations;
    }
    ok = ok && violations == 0;
    detail += fmt::format("Pigou-Dalton violations {} / 300", violations);
    return verdict(ok, detail);
  });

  criterion(5, "shortest-path monotonicity under added DRT edges", 60.0, [] {
    const City c = synthetic_city_data();
    MultilayerGraph g(c.network, c.grid);
    const TravelTimeMatrix base = g.all_pairs();
    std::vector<double> sigma;
    for (int i = 0; i < g.centroid_count(); ++i) sigma.push_back(c.grid.tile(g.tile_id(i)).sigma);
    const auto acc0 = tile_accessibility(base, sigma, c.grid.tile_length_km());
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> flow(0.0, 8.0);
    const DrtParams p;
    long long pairs = 0, increases = 0, acc_drops = 0;
    int sets = 0;
    for (int trial = 0; trial < 25; ++trial) {
      MultilayerGraph h(c.network, c.grid);
      for (const DrtArea& a : c.areas) {
        if (rng() % 2) continue;
        std::vector<TileFlows> f(6);
        for (auto& t : f) t = {flow(rng), flow(rng)};
        const DrtPerformance perf = solve_headway(a.id, a.d_km, f, p, 1 + static_cast<int>(rng() % 4));
        if (perf.feasible) h.set_area_service(a, perf);
      }
      if (h.drt_edge_count() == 0) continue;
      ++sets;
      const TravelTimeMatrix tt = h.all_pairs();
      for (int i = 0; i < tt.size(); ++i)
        for (int j = 0; j < tt.size(); ++j) {
          ++pairs;
          if (tt.at(i, j) > base.at(i, j) + 1e-12) ++increases;
        }
      const auto acc = tile_accessibility(tt, sigma, c.grid.tile_length_km());
      for (std::size_t i = 0; i < acc.size(); ++i)
        if (acc[i] < acc0[i] - 1e-12 * std::abs(acc0[i])) ++acc_drops;
    }
    return verdict(sets > 0 && increases == 0 && acc_drops == 0,
                   fmt::format("{} edge sets, {} OD pairs per set ({} checked), {} increases, {} accessibility drops",
                               sets, base.size() * base.size(), pairs, increases, acc_drops));
  });

  criterion(6, "assignment convergence on every fixture", 60.0, [] {
    int runs = 0, converged = 0, flagged = 0, unresolved = 0, max_iter = 0;
    auto tally = [&](const AssignmentResult& r) {
      ++runs;
      max_iter = std::max(max_iter, r.iterations);
      if (r.converged) ++converged;
      else if (!r.feasible) ++flagged;
      else ++unresolved;
      if (r.iterations > 50) ++unresolved;
    };
    // Synthetic city: every candidate area with 1 to 3 buses, fresh state.
    const City c = synthetic_city_data();
    for (std::size_t a = 0; a < c.areas.size(); ++a)
      for (int n = 1; n <= 3; ++n) {
        Planner p(c.network, c.grid, c.areas, PlannerConfig{});
        tally(p.assign(static_cast<int>(a), n));
      }
    // Sequential greedy on the same city.
    {
      Planner p(c.network, c.grid, c.areas, PlannerConfig{});
      allocate_fleet(p, 12, [&](const StepLog& s, const Planner&) {
        ++runs;
        max_iter = std::max(max_iter, s.assignment_iterations);
        if (s.converged) ++converged;
        else if (!s.feasible) ++flagged;
        else ++unresolved;
      });
    }
    // Saturation: a dense city where one bus cannot keep up.
    bool saturation_flagged = false;
    {
      SyntheticCityOptions o;
      o.rows = 6;
      o.cols = 6;
      o.pop_min = 20000;
      o.pop_max = 30000;
      SyntheticCity s = make_synthetic_city(o);
      const auto st = s.network.station_locations();
      const TileGrid g = filter_study_area(build_grid(s.bbox, 1.0, s.population), st, 5.0);
      const auto areas = partition_drt_areas(g, st, 6);
      Planner p(s.network, g, areas, PlannerConfig{});
      const AssignmentResult r = p.assign(0, 1);
      tally(r);
      saturation_flagged = !r.feasible && p.graph().drt_edge_count() == 0;
    }
    return verdict(unresolved == 0 && saturation_flagged,
                   fmt::format("{} assignments: {} converged, {} flagged infeasible, {} unresolved, max {} iterations; "
                               "saturation fixture flagged: {}",
                               runs, converged, flagged, unresolved, max_iter, saturation_flagged));
  });

  criterion(7, "directional equity on the synthetic city", 600.0, [] {
    ScenarioConfig c = synthetic_config("sweep");
    const ScenarioData data = load_scenario_data(c);
    const std::vector<int> sizes{0, 4, 8, 12};
    const auto rows = sweep_fleet(c, data, sizes);
    bool atk_ok = true, mean_ok = true;
    std::string detail = "AccEq Atkinson";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      detail += fmt::format(" N={}:{:.6f}", rows[i].fleet_size, rows[i].report.atkinson);
      if (i > 0) {
        atk_ok = atk_ok && rows[i].report.atkinson <= rows[i - 1].report.atkinson + 1e-6;
        mean_ok = mean_ok && rows[i].report.mean >= rows[i - 1].report.mean;
      }
    }
    const double ours = rows.back().report.atkinson;
    ScenarioConfig b = c;
    b.mode = PlannerMode::Baseline;
    b.fleet_size = sizes.back();
    std::vector<double> base;
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      b.seed = seed;
      base.push_back(run_scenario(b, data, std::nullopt).after.atkinson);
      if (ours < base.back()) ++wins;
    }
    std::vector<double> sorted = base;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[9] + sorted[10]);
    const bool win_ok = wins >= 18 && ours < median;
    detail += fmt::format("; (a) non-increasing {}; (b) wins {}/20, baseline median {:.6f}; (c) mean non-decreasing {}",
                          atk_ok, wins, median, mean_ok);
    return verdict(atk_ok && win_ok && mean_ok, detail);
  });

  criterion(8, "byte-identical artifacts for identical config and seed", 120.0, [] {
    bool ok = true;
    std::string detail;
    for (PlannerMode mode : {PlannerMode::AccEq, PlannerMode::Baseline}) {
      ScenarioConfig c = synthetic_config("det");
      c.fleet_size = 8;
      c.mode = mode;
      c.seed = 3;
      const fs::path root = c.output_dir;
      c.output_dir = root / "a";
      run_scenario(c);
      c.output_dir = root / "b";
      run_scenario(c);
      for (const char* f : {"metrics.json", "tiles.csv", "allocation.csv"}) {
        const bool same = slurp(root / "a" / f) == slurp(root / "b" / f);
        ok = ok && same;
        if (!same) detail += fmt::format("{} differs ({}); ", f, mode_name(mode));
      }
    }
    return verdict(ok, detail.empty() ? "metrics.json, tiles.csv, allocation.csv identical (acceq, baseline)" : detail);
  });

  criterion(9, "full-scale city run (optional)", 3 * 3600.0, []() -> Outcome {
    const char* path = std::getenv("DRTPLAN_MONTREAL_CONFIG");
    if (!path || !*path) return {Outcome::Skip, "set DRTPLAN_MONTREAL_CONFIG to a scenario file to run"};
    ScenarioConfig c = ScenarioConfig::load(path);
    if (c.fleet_size == 0) c.fleet_size = 1500;
    c.mode = PlannerMode::AccEq;
    const ScenarioResult r = run_scenario(c);
    const double reduction = 1.0 - r.after.atkinson / r.before.atkinson;
    return verdict(reduction >= 0.20, fmt::format("N={}, Atkinson {:.6f} -> {:.6f}, reduction {:.1f}% (need >= 20%)",
                                                  c.fleet_size, r.before.atkinson, r.after.atkinson, 100 * reduction));
  });

  fmt::print("{} criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
