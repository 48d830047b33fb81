#include "drtplan/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "drtplan/error.hpp"

namespace drtplan {

void DemandParams::validate() const {
  if (!(trip_mean_per_day > 0.0)) throw_invalid("trip_mean must be positive");
  if (t_peak_h < 0.0 || t_off_peak_h < 0.0) throw_invalid("peak / off-peak durations must be non-negative");
  if (ratio_peak < 0.0 || ratio_off_peak < 0.0) throw_invalid("trip-rate ratio terms must be non-negative");
  if (!(beta_per_min >= 0.0)) throw_invalid("beta must be non-negative");
}

double DemandParams::peak_trip_rate() const {
  return trip_rate_peak(trip_mean_per_day, t_peak_h, t_off_peak_h, ratio_peak, ratio_off_peak);
}

double trip_rate_peak(double trip_mean_per_day, double t_peak_h, double t_off_peak_h, double ratio_peak,
                      double ratio_off_peak) {
  // Trip_peak = ratio_peak * u, Trip_off = ratio_off_peak * u.
  if (!(trip_mean_per_day >= 0.0) || !(t_peak_h >= 0.0) || !(t_off_peak_h >= 0.0) || !(ratio_peak >= 0.0) ||
      !(ratio_off_peak >= 0.0))
    throw_invalid("trip-rate inputs must be non-negative");
  const double denom = ratio_peak * t_peak_h + ratio_off_peak * t_off_peak_h;
  if (!(denom > 0.0) || !(ratio_peak > 0.0))
    throw_invalid("degenerate trip-rate split (no peak time or zero peak share)");
  return trip_mean_per_day * ratio_peak / denom;
}

OdMatrix::OdMatrix(int centroids)
    : m_(centroids), trips_(static_cast<std::size_t>(centroids) * static_cast<std::size_t>(centroids), 0.0) {}

double OdMatrix::row_sum(int i) const {
  double s = 0.0;
  for (int j = 0; j < m_; ++j) s += at(i, j);
  return s;
}

void gravity_row(OdMatrix& od, int origin, std::span<const double> phi, std::span<const double> sigma,
                 const TravelTimeMatrix& tt, double beta_per_min, double tile_length_km) {
  const int M = tt.size();
  const auto row = tt.row(origin);
  // Shift by the smallest exponent so the weights cannot all underflow.
  double t_min = std::numeric_limits<double>::infinity();
  for (int j = 0; j < M; ++j)
    if (sigma[static_cast<std::size_t>(j)] > 0.0) t_min = std::min(t_min, row[static_cast<std::size_t>(j)]);
  double denom = 0.0;
  std::vector<double> w(static_cast<std::size_t>(M), 0.0);
  if (std::isfinite(t_min)) {
    for (int j = 0; j < M; ++j) {
      const double s = sigma[static_cast<std::size_t>(j)];
      if (s <= 0.0) continue;
      w[static_cast<std::size_t>(j)] = s * std::exp(-beta_per_min * 60.0 * (row[static_cast<std::size_t>(j)] - t_min));
      denom += w[static_cast<std::size_t>(j)];
    }
  }
  if (!(denom > 0.0)) throw_data(fmt::format("no opportunities reachable from centroid {}", origin));
  const double total = phi[static_cast<std::size_t>(origin)] * tile_length_km * tile_length_km;
  for (int j = 0; j < M; ++j) od.at(origin, j) = total * w[static_cast<std::size_t>(j)] / denom;
}

OdMatrix gravity_od(std::span<const double> phi, std::span<const double> sigma, const TravelTimeMatrix& tt,
                    double beta_per_min, double tile_length_km) {
  const int M = tt.size();
  if (phi.size() != static_cast<std::size_t>(M) || sigma.size() != static_cast<std::size_t>(M))
    throw_invalid("demand vectors do not match the travel-time matrix");
  OdMatrix od(M);
  for (int i = 0; i < M; ++i) gravity_row(od, i, phi, sigma, tt, beta_per_min, tile_length_km);
  return od;
}

std::vector<TileFlows> drt_flows(const OdMatrix& od, const TravelTimeMatrix& tt, std::span<const int> area_centroids,
                                 double tile_length_km) {
  const int M = tt.size();
  std::vector<std::uint8_t> in_area(static_cast<std::size_t>(M), 0);
  for (int c : area_centroids) {
    if (c < 0 || c >= M) throw_invalid(fmt::format("centroid {} is not in the study area", c));
    in_area[static_cast<std::size_t>(c)] = 1;
  }
  const double area = tile_length_km * tile_length_km;
  std::vector<TileFlows> flows;
  flows.reserve(area_centroids.size());
  for (int k : area_centroids) {
    TileFlows f;
    for (int j = 0; j < M; ++j) {
      if (in_area[static_cast<std::size_t>(j)]) continue;
      if (tt.first_mile(k, j)) f.out += od.at(k, j);
      if (tt.last_mile(j, k)) f.in += od.at(j, k);
    }
    f.out /= area;
    f.in /= area;
    flows.push_back(f);
  }
  return flows;
}

void write_od_csv(const MultilayerGraph& graph, const OdMatrix& od, std::ostream& out) {
  out << "origin,dest,trips_per_hour\n";
  for (int i = 0; i < od.size(); ++i)
    for (int j = 0; j < od.size(); ++j)
      fmt::print(out, "{},{},{:.6f}\n", graph.tile_id(i), graph.tile_id(j), od.at(i, j));
}

}  // namespace drtplan
