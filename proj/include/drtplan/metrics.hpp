#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "drtplan/multilayer.hpp"

namespace drtplan {

// Gravity accessibility: acc_i = sum_j sigma_j l^2 / T_ij (opportunities per
// hour), own tile included through the intra-tile time floor.
std::vector<double> tile_accessibility(const TravelTimeMatrix& tt, std::span<const double> sigma,
                                       double tile_length_km);

// Individual-level accessibility in weighted form: every resident of tile i
// carries acc[i]; population[i] is the (real-valued) resident count.
struct AccessibilityField {
  std::vector<double> acc;
  std::vector<double> population;

  double total_population() const;
};

// Mean accessibility of the ceil(m% * |V|) residents with the lowest values.
// m = 100 gives the population-weighted mean.
double bottom_m_accessibility(const AccessibilityField& field, double m_percent);
double mean_accessibility(const AccessibilityField& field);

// 1 - harmonic mean / arithmetic mean (Atkinson, epsilon = 2).
double atkinson(const AccessibilityField& field);
// mean of (x/mu) ln(x/mu)
double theil(const AccessibilityField& field);
// sum |x - mu| / (2 N mu)
double pietra(const AccessibilityField& field);
// Share of the top 10% over share of the bottom 40%; absent below 10 residents.
std::optional<double> palma(const AccessibilityField& field);

struct InequalityReport {
  double atkinson = 0.0;
  double theil = 0.0;
  double pietra = 0.0;
  std::optional<double> palma;
  double mean = 0.0;
  std::map<double, double> bottom_m;  // m percent -> accessibility
};

InequalityReport inequality_suite(const AccessibilityField& field, std::span<const double> m_values = {});

}  // namespace drtplan
