#include <gtest/gtest.h>

#include <sstream>

#include "drtplan/demand.hpp"
#include "drtplan/error.hpp"

using namespace drtplan;

TEST(Demand, TripRate) {
  EXPECT_NEAR(trip_rate_peak(1.32, 5.5, 8.5, 10, 3), 0.16397515527950313, 1e-15);
  EXPECT_NEAR(trip_rate_peak(1.32, 5.5, 8.5, 10, 3), 0.16, 0.005);
  EXPECT_DOUBLE_EQ(trip_rate_peak(2.0, 1.0, 1.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(trip_rate_peak(1.32, 5.5, 8.5, 1.0, 0.0), 1.32 / 5.5);
  EXPECT_THROW(trip_rate_peak(1.32, 0.0, 0.0, 10, 3), Error);
  EXPECT_THROW(trip_rate_peak(1.32, 5.5, 8.5, 0, 0), Error);
  EXPECT_DOUBLE_EQ(DemandParams{}.peak_trip_rate(), trip_rate_peak(1.32, 5.5, 8.5, 10, 3));
}

TEST(Demand, OriginDensity) {
  EXPECT_DOUBLE_EQ(origin_density(100.0, 0.16), 16.0);
  EXPECT_EQ(origin_density(0.0, 0.16), 0.0);
  EXPECT_DOUBLE_EQ(origin_density(200.0, 0.16), 2 * origin_density(100.0, 0.16));
}

TEST(Demand, GravityHandExample) {
  // Origin 0 has no opportunities; destinations at 15 and 30 minutes.
  TravelTimeMatrix tt(3, 0);
  tt.set(0, 0, 0.2);
  tt.set(0, 1, 0.25);
  tt.set(0, 2, 0.5);
  for (int j = 0; j < 3; ++j) {
    tt.set(1, j, j == 1 ? 0.2 : 0.3);
    tt.set(2, j, j == 2 ? 0.2 : 0.3);
  }
  const std::vector<double> phi{16.0, 0.0, 0.0};
  const std::vector<double> sigma{0.0, 100.0, 300.0};
  const OdMatrix od = gravity_od(phi, sigma, tt, 0.12, 1.0);
  // scipy: 16 * [100 e^-1.8, 300 e^-3.6] / sum
  EXPECT_NEAR(od.at(0, 1), 10.69592598, 1e-7);
  EXPECT_NEAR(od.at(0, 2), 5.30407402, 1e-7);
  EXPECT_NEAR(od.at(0, 1) / 16.0, 0.668, 5e-4);
  EXPECT_NEAR(od.row_sum(0), 16.0, 1e-12);
  EXPECT_EQ(od.row_sum(1), 0.0);
}

TEST(Demand, GravitySymmetryAndBetaZero) {
  TravelTimeMatrix tt(3, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tt.set(i, j, i == j ? 0.2 : 0.5);
  const std::vector<double> phi{10.0, 0.0, 0.0};
  const OdMatrix even = gravity_od(phi, std::vector<double>{0.0, 50.0, 50.0}, tt, 0.12, 1.0);
  EXPECT_DOUBLE_EQ(even.at(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(even.at(0, 2), 5.0);
  tt.set(0, 2, 2.0);
  const OdMatrix flat = gravity_od(phi, std::vector<double>{0.0, 100.0, 300.0}, tt, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(flat.at(0, 1), 2.5);
  EXPECT_DOUBLE_EQ(flat.at(0, 2), 7.5);
  // Tile area scales the row total.
  const OdMatrix big = gravity_od(phi, std::vector<double>{0.0, 100.0, 300.0}, tt, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(big.row_sum(0), 40.0);
}

TEST(Demand, GravityStableForLongTrips) {
  TravelTimeMatrix tt(2, 0);
  tt.set(0, 0, 50.0);
  tt.set(0, 1, 60.0);
  tt.set(1, 0, 60.0);
  tt.set(1, 1, 50.0);
  const OdMatrix od = gravity_od(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 1.0}, tt, 0.12, 1.0);
  EXPECT_NEAR(od.row_sum(0), 1.0, 1e-12);
  EXPECT_GT(od.at(0, 0), 0.99);
  EXPECT_THROW(gravity_od(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}, tt, 0.12, 1.0), Error);
}

TEST(Demand, DrtFlows) {
  TravelTimeMatrix tt(3, 0);
  tt.set(0, 2, 0.5, true, false);  // 0 leaves by DRT
  tt.set(2, 0, 0.5, false, true);  // 2 -> 0 arrives by DRT
  tt.set(0, 1, 0.1, true, true);   // inside the area: ignored
  OdMatrix od(3);
  od.at(0, 2) = 8.0;
  od.at(2, 0) = 3.0;
  od.at(0, 1) = 100.0;
  const std::vector<int> area{0, 1};
  const auto f = drt_flows(od, tt, area, 1.0);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_DOUBLE_EQ(f[0].out, 8.0);
  EXPECT_DOUBLE_EQ(f[0].in, 3.0);
  EXPECT_EQ(f[1].out, 0.0);
  EXPECT_EQ(f[1].in, 0.0);
  const auto f2 = drt_flows(od, tt, area, 2.0);
  EXPECT_DOUBLE_EQ(f2[0].out, 2.0);
  OdMatrix none(3);
  for (const auto& x : drt_flows(none, tt, area, 1.0)) EXPECT_EQ(x.out + x.in, 0.0);
}
