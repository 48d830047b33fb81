#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "drtplan/drt_model.hpp"
#include "drtplan/multilayer.hpp"

namespace drtplan {

struct DemandParams {
  double trip_mean_per_day = 1.32;  // trips/person/day
  double t_peak_h = 5.5;
  double t_off_peak_h = 8.5;
  double ratio_peak = 10.0;         // peak : off-peak hourly trip rate
  double ratio_off_peak = 3.0;
  double beta_per_min = 0.12;       // gravity dispersion, exponent uses minutes

  void validate() const;
  double peak_trip_rate() const;
};

// Peak-hour trip rate from the daily mean and the peak:off-peak ratio.
double trip_rate_peak(double trip_mean_per_day, double t_peak_h, double t_off_peak_h, double ratio_peak,
                      double ratio_off_peak);

// Trip origination density (trips/h/km^2).
inline double origin_density(double rho, double trip_rate) { return trip_rate * rho; }

// Origin-destination flows in trips/h between study centroids.
class OdMatrix {
 public:
  OdMatrix() = default;
  explicit OdMatrix(int centroids);

  int size() const { return m_; }
  double at(int i, int j) const { return trips_[idx(i, j)]; }
  double& at(int i, int j) { return trips_[idx(i, j)]; }
  double row_sum(int i) const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(j);
  }
  int m_ = 0;
  std::vector<double> trips_;
};

// Singly constrained gravity model:
//   phi_ij = phi_i l^2 * sigma_j exp(-beta T_ij) / sum_k sigma_k exp(-beta T_ik)
// with T in minutes. phi and sigma are per-centroid densities.
OdMatrix gravity_od(std::span<const double> phi, std::span<const double> sigma, const TravelTimeMatrix& tt,
                    double beta_per_min, double tile_length_km);
// Recomputes one origin row in place.
void gravity_row(OdMatrix& od, int origin, std::span<const double> phi, std::span<const double> sigma,
                 const TravelTimeMatrix& tt, double beta_per_min, double tile_length_km);

// Per-tile first-mile / last-mile DRT flow densities of an area, in the
// order of `area_centroids`. Pairs with both ends in the area are excluded.
std::vector<TileFlows> drt_flows(const OdMatrix& od, const TravelTimeMatrix& tt, std::span<const int> area_centroids,
                                 double tile_length_km);

// origin,dest,trips_per_hour (tile ids)
void write_od_csv(const MultilayerGraph& graph, const OdMatrix& od, std::ostream& out);

}  // namespace drtplan
