#include <gtest/gtest.h>

#include <sstream>

#include "drtplan/error.hpp"
#include "drtplan/multilayer.hpp"
#include "support.hpp"

using namespace drtplan;

namespace {

// 2 x 12 km strip; line A (0, 1) -> B (11.5, 1), 10 min ride, 4 min headway.
struct Strip {
  TileGrid grid = test::grid_with(2, 12, std::vector<double>(24, 10.0));
  TransitNetwork net;
  std::vector<DrtArea> areas;

  Strip() {
    const int a = net.add_station("A", "A", test::at_km(grid, 0.0, 1.0));
    const int b = net.add_station("B", "B", test::at_km(grid, 11.5, 1.0));
    net.add_bidirectional_line("L", {a, b}, {10.0}, {0.0, 0.0}, 4.0);
    areas = partition_drt_areas(grid, net.station_locations(), 6);
  }
  int c(const MultilayerGraph& g, int row, int col) const { return *g.centroid_of_tile(grid.index(row, col)); }
};

DrtPerformance idle_service(const DrtArea& a, int buses) {
  return solve_headway(a.id, a.d_km, std::vector<TileFlows>(static_cast<std::size_t>(a.K())), DrtParams{}, buses);
}

}  // namespace

TEST(Multilayer, DrtEdgesPerArea) {
  Strip s;
  ASSERT_EQ(s.areas.size(), 4u);
  MultilayerGraph g(s.net, s.grid);
  EXPECT_EQ(g.drt_edge_count(), 0u);
  g.set_area_service(s.areas[0], idle_service(s.areas[0], 1));
  EXPECT_EQ(g.drt_edge_count(), 12u);
  EXPECT_TRUE(g.has_area_service(0));
  DrtPerformance saturated;
  saturated.area_id = 0;
  saturated.buses = 1;
  saturated.feasible = false;
  g.set_area_service(s.areas[0], saturated);
  EXPECT_EQ(g.drt_edge_count(), 0u);
  g.set_area_service(s.areas[0], idle_service(s.areas[0], 1));
  g.clear_area_service(0);
  EXPECT_FALSE(g.has_area_service(0));
}

TEST(Multilayer, WalkingTimes) {
  Strip s;
  const MultilayerGraph g(s.net, s.grid);
  const int a = s.c(g, 0, 5), b = s.c(g, 0, 6);
  // Great-circle length of a projected 1 km step: exact to ~1e-4 at city scale.
  EXPECT_NEAR(g.shortest_time(a, b), 1.0 / 4.5, 1e-4);
  EXPECT_NEAR(g.shortest_time(a, b) * 60.0, 13.33, 0.01);
  EXPECT_DOUBLE_EQ(g.walk_time_h(a, a), 1.0 / 4.5);
  EXPECT_DOUBLE_EQ(g.shortest_time(a, a), 1.0 / 4.5);
}

TEST(Multilayer, TransitBeatsLongWalk) {
  Strip s;
  const MultilayerGraph g(s.net, s.grid);
  const int o = s.c(g, 0, 0), d = s.c(g, 0, 11);
  const PathResult p = g.shortest_path(o, d);
  const double walk = g.walk_time_h(o, d);
  EXPECT_NEAR(walk, 11.0 / 4.5, 1e-3);
  const double expected = std::sqrt(0.5) / 4.5 + 2.0 / 60 + 10.0 / 60 + 0.5 / 4.5;
  EXPECT_NEAR(p.duration_h, expected, 1e-3);
  EXPECT_LT(p.duration_h, walk);
  std::vector<EdgeKind> kinds;
  double sum = 0.0;
  int at = o;
  for (const PathStep& st : p.steps) {
    kinds.push_back(st.kind);
    EXPECT_EQ(st.from, at);
    at = st.to;
    sum += st.weight_h;
  }
  EXPECT_EQ(at, d);
  EXPECT_NEAR(sum, p.duration_h, 1e-12);
  EXPECT_EQ(kinds, (std::vector<EdgeKind>{EdgeKind::Walk, EdgeKind::Board, EdgeKind::Ride, EdgeKind::Alight,
                                          EdgeKind::Walk}));
}

TEST(Multilayer, DrtNeverSlowsAnything) {
  Strip s;
  MultilayerGraph g(s.net, s.grid);
  const TravelTimeMatrix before = g.all_pairs();
  g.set_area_service(s.areas[0], idle_service(s.areas[0], 3));
  g.set_area_service(s.areas[3], idle_service(s.areas[3], 1));
  const TravelTimeMatrix after = g.all_pairs();
  int improved = 0;
  for (int i = 0; i < before.size(); ++i)
    for (int j = 0; j < before.size(); ++j) {
      EXPECT_LE(after.at(i, j), before.at(i, j) + 1e-12);
      improved += after.at(i, j) < before.at(i, j) - 1e-9;
    }
  EXPECT_GT(improved, 0);
}

TEST(Multilayer, PartialRefreshMatchesFullRecompute) {
  Strip s;
  MultilayerGraph g(s.net, s.grid);
  TravelTimeMatrix tt = g.all_pairs();
  g.set_area_service(s.areas[0], idle_service(s.areas[0], 2));
  g.refresh(tt, g.area_centroids(s.areas[0]));
  g.set_area_service(s.areas[3], idle_service(s.areas[3], 1));
  g.refresh(tt, g.area_centroids(s.areas[3]));
  g.clear_area_service(0);
  g.refresh(tt, g.area_centroids(s.areas[0]));
  const TravelTimeMatrix full = g.all_pairs();
  for (int i = 0; i < tt.size(); ++i)
    for (int j = 0; j < tt.size(); ++j) {
      EXPECT_DOUBLE_EQ(tt.at(i, j), full.at(i, j)) << i << "->" << j;
      EXPECT_EQ(tt.first_mile(i, j), full.first_mile(i, j));
      EXPECT_EQ(tt.last_mile(i, j), full.last_mile(i, j));
    }
}

TEST(Multilayer, DrtUsageFlags) {
  Strip s;
  MultilayerGraph g(s.net, s.grid);
  g.set_area_service(s.areas[0], idle_service(s.areas[0], 50));
  const TravelTimeMatrix tt = g.all_pairs();
  const auto cents = g.area_centroids(s.areas[0]);
  const int far = s.c(g, 0, 11);
  const int k = s.c(g, 0, 2);  // farthest member from A
  const DrtUsage u = drt_usage(tt, cents, k, far);
  EXPECT_TRUE(u.first_mile);
  EXPECT_TRUE(u.last_mile);
  const PathResult p = g.shortest_path(k, far);
  EXPECT_EQ(p.steps.front().kind, EdgeKind::DrtIngress);
  // Same area: never DRT.
  const DrtUsage inside = drt_usage(tt, cents, k, s.c(g, 1, 0));
  EXPECT_FALSE(inside.first_mile);
  EXPECT_FALSE(inside.last_mile);
  // Next-door tile outside the area: walking wins.
  const DrtUsage near = drt_usage(tt, cents, k, s.c(g, 0, 3));
  EXPECT_FALSE(near.first_mile);
  EXPECT_FALSE(near.last_mile);
  EXPECT_THROW(drt_usage(tt, cents, far, k), Error);
}

TEST(Multilayer, AssembleAndExport) {
  Strip s;
  const std::vector<DrtPerformance> alloc{idle_service(s.areas[1], 1)};
  const MultilayerGraph g = assemble(s.net, s.grid, s.areas, alloc);
  EXPECT_EQ(g.drt_edge_count(), 12u);
  DrtPerformance ghost = alloc[0];
  ghost.area_id = 99;
  EXPECT_THROW(assemble(s.net, s.grid, s.areas, std::vector<DrtPerformance>{ghost}), Error);
  std::ostringstream out;
  write_travel_times_csv(g, g.all_pairs(), out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "origin_id,dest_id,minutes,used_drt_first,used_drt_last");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 24 * 24);
}

TEST(Multilayer, OverlappingServiceRejected) {
  Strip s;
  MultilayerGraph g(s.net, s.grid);
  g.set_area_service(s.areas[0], idle_service(s.areas[0], 1));
  DrtArea clash = s.areas[1];
  clash.id = 7;
  clash.member_tiles = s.areas[0].member_tiles;
  DrtPerformance perf = idle_service(clash, 1);
  EXPECT_THROW(g.set_area_service(clash, perf), Error);
}
