#include <gtest/gtest.h>

#include <cmath>

#include "drtplan/drt_model.hpp"
#include "drtplan/error.hpp"

using namespace drtplan;

namespace {

// Values produced by an independent scipy brentq solve of h * N = C(2 h 30)
// with v = 25 km/h, tau_s = 32 s, tau_T = 1 min, d = 2, K = 6, l = 1.
constexpr double kOracleH = 0.6965878556500253;
constexpr double kOracleN = 41.79527133900152;
constexpr double kOracleC = 1.393175711300051;
constexpr double kOracleTinLast = 0.5310585704333503;

std::vector<TileFlows> uniform_symmetric(double total_out, int K = 6) {
  return std::vector<TileFlows>(static_cast<std::size_t>(K), TileFlows{total_out / K, 0.0});
}

}  // namespace

TEST(DrtModel, PickupCounts) {
  const std::vector<TileFlows> zero(6);
  EXPECT_EQ(pickups_dropoffs(zero, 0.5, 1.0).total, 0.0);
  const std::vector<TileFlows> one{{4.0, 2.0}};
  EXPECT_DOUBLE_EQ(pickups_dropoffs(one, 0.5, 1.0).total, 3.0);
  EXPECT_DOUBLE_EQ(pickups_dropoffs(uniform_symmetric(30.0), 0.5, 1.0, true).total, 30.0);
  EXPECT_DOUBLE_EQ(pickups_dropoffs(one, 0.5, 2.0).per_tile[0], 12.0);
}

TEST(DrtModel, CycleLength) {
  const DrtParams p;
  EXPECT_DOUBLE_EQ(cycle_length_km(p, 2.0, 0.0), 16.0 / 3.0);
  EXPECT_DOUBLE_EQ(cycle_length_km(p, 2.0, 5.0), 12.0);
  const double big = 1e7;
  EXPECT_NEAR(cycle_length_km(p, 2.0, big + 1) - cycle_length_km(p, 2.0, big), 1.0 / 3.0, 1e-6);
}

TEST(DrtModel, CycleTime) {
  const DrtParams p;
  EXPECT_NEAR(cycle_time_h(p, 12.0, 5.0), 0.48 + 5 * 32.0 / 3600.0 + 1.0 / 60.0, 1e-12);
  EXPECT_NEAR(cycle_time_h(p, 12.0, 5.0), 0.5411111111111111, 1e-12);
  EXPECT_NEAR(cycle_time_h(p, 16.0 / 3.0, 0.0), 0.23, 1e-12);
  DrtParams q;
  q.tau_stop_h = 0.0;
  q.tau_terminal_h = 0.0;
  EXPECT_DOUBLE_EQ(cycle_time_h(q, q.v_drt_kmh, 3.0), 1.0);
}

TEST(DrtModel, HeadwayZeroFlows) {
  const DrtPerformance perf = solve_headway(0, 2.0, std::vector<TileFlows>(6), DrtParams{}, 1);
  ASSERT_TRUE(perf.feasible);
  EXPECT_NEAR(perf.headway_h, 0.23, 1e-12);
  EXPECT_EQ(perf.n_total, 0.0);
  for (double t : perf.t_in_h) EXPECT_NEAR(t, 0.23 / 2 + 2.0 / 25.0, 1e-12);
  const DrtPerformance two = solve_headway(0, 2.0, std::vector<TileFlows>(6), DrtParams{}, 2);
  EXPECT_NEAR(two.headway_h, 0.115, 1e-12);
}

TEST(DrtModel, HeadwayWorkedExample) {
  DrtParams p;
  p.symmetric_demand = true;
  const DrtPerformance perf = solve_headway(3, 2.0, uniform_symmetric(30.0), p, 2);
  ASSERT_TRUE(perf.feasible);
  EXPECT_NEAR(perf.n_total, 41.8, 0.2);
  EXPECT_NEAR(perf.headway_h, 0.697, 0.003);
  EXPECT_NEAR(perf.headway_h, kOracleH, 1e-9);
  EXPECT_NEAR(perf.n_total, kOracleN, 1e-7);
  EXPECT_NEAR(perf.cycle_time_h, kOracleC, 1e-9);
  EXPECT_LT(perf.residual_h, 1e-6);
  EXPECT_LT(std::abs(perf.headway_h * 2 - cycle_time_h(p, cycle_length_km(p, 2.0, perf.n_total), perf.n_total)),
            1e-6);
  EXPECT_EQ(perf.area_id, 3);
  EXPECT_EQ(perf.buses, 2);
}

TEST(DrtModel, AccessTimesUniform) {
  DrtParams p;
  p.symmetric_demand = true;
  const DrtPerformance perf = solve_headway(0, 2.0, uniform_symmetric(30.0), p, 2);
  ASSERT_EQ(perf.t_in_h.size(), 6u);
  EXPECT_NEAR(perf.t_in_h[5], kOracleTinLast, 1e-9);
  EXPECT_NEAR(perf.t_in_h[5], 0.531, 5e-4);
  const double span = perf.cycle_time_h - 2.0 * 2.0 / 25.0;
  EXPECT_NEAR(perf.t_in_h[0], perf.headway_h / 2 + 11.0 / 12.0 * span + 0.08, 1e-12);
  for (std::size_t k = 1; k < 6; ++k) EXPECT_LT(perf.t_in_h[k], perf.t_in_h[k - 1]);
  EXPECT_EQ(perf.t_in_h, perf.t_out_h);
  // Weighted fraction is 1/2 on average over uniform demand.
  double mean_fraction = 0.0;
  for (double t : perf.t_in_h) mean_fraction += (t - perf.headway_h / 2 - 0.08) / span;
  EXPECT_NEAR(mean_fraction / 6, 0.5, 1e-12);
}

TEST(DrtModel, MoreBusesShorterHeadway) {
  DrtParams p;
  p.symmetric_demand = true;
  double prev = 1e9, prev_n = 1e9;
  EXPECT_FALSE(solve_headway(0, 2.0, uniform_symmetric(30.0), p, 1).feasible);  // 60 stops/h
  for (int n : {2, 4, 8, 64, 4096}) {
    const DrtPerformance perf = solve_headway(0, 2.0, uniform_symmetric(30.0), p, n);
    ASSERT_TRUE(perf.feasible);
    EXPECT_LT(perf.headway_h, prev);
    EXPECT_LT(perf.n_total, prev_n);
    prev = perf.headway_h;
    prev_n = perf.n_total;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(DrtModel, SaturationIsInfeasible) {
  // 45 stops/h is the hard per-bus ceiling (l/(3v) + tau_s per stop).
  std::vector<TileFlows> heavy(6, TileFlows{20.0, 20.0});
  const DrtPerformance perf = solve_headway(0, 2.0, heavy, DrtParams{}, 1);
  EXPECT_FALSE(perf.feasible);
  EXPECT_TRUE(perf.t_in_h.empty());
  EXPECT_THROW(access_times(DrtParams{}, 2.0, perf), Error);
  EXPECT_TRUE(solve_headway(0, 2.0, heavy, DrtParams{}, 6).feasible);
}

TEST(DrtModel, InvalidInput) {
  EXPECT_THROW(solve_headway(0, 2.0, std::vector<TileFlows>(6), DrtParams{}, 0), Error);
  DrtParams odd;
  odd.K = 5;
  EXPECT_THROW(odd.validate(), Error);
  EXPECT_THROW(pickups_dropoffs(std::vector<TileFlows>(6), 0.0, 1.0), Error);
}

TEST(DrtModel, MonteCarloMatchesClosedForm) {
  const DrtParams p;
  for (int n : {1, 5, 20}) {
    const CycleEstimate est = simulate_cycle_length(p, 2.0, n, 100000, 42);
    const double eq = cycle_length_km(p, 2.0, n);
    EXPECT_LT(std::abs(est.mean_km - eq) / eq, 0.05) << "n=" << n << " mc=" << est.mean_km << " eq=" << eq;
  }
  // n = 5 lands within 1% of 12 km.
  EXPECT_NEAR(simulate_cycle_length(p, 2.0, 5, 100000, 7).mean_km, 12.0, 0.12);
}

TEST(DrtModel, MonteCarloEmptyTour) {
  // Both rows crossed along their centre lines: 2d + 2l, no randomness.
  const CycleEstimate est = simulate_cycle_length(DrtParams{}, 2.0, 0, 100, 1);
  EXPECT_DOUBLE_EQ(est.mean_km, 6.0);
  EXPECT_DOUBLE_EQ(est.std_error_km, 0.0);
}

TEST(DrtModel, MonteCarloDeterministicAndClt) {
  const DrtParams p;
  const CycleEstimate a = simulate_cycle_length(p, 2.0, 5, 20000, 99);
  const CycleEstimate b = simulate_cycle_length(p, 2.0, 5, 20000, 99);
  EXPECT_EQ(a.mean_km, b.mean_km);
  const CycleEstimate c = simulate_cycle_length(p, 2.0, 5, 40000, 99);
  EXPECT_NEAR(c.std_error_km / a.std_error_km, std::sqrt(0.5), 0.03);
}
