#include "drtplan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "drtplan/error.hpp"

namespace drtplan {

std::vector<double> tile_accessibility(const TravelTimeMatrix& tt, std::span<const double> sigma,
                                       double tile_length_km) {
  const int M = tt.size();
  if (sigma.size() != static_cast<std::size_t>(M)) throw_invalid("opportunity vector does not match the matrix");
  const double area = tile_length_km * tile_length_km;
  std::vector<double> acc(static_cast<std::size_t>(M), 0.0);
  for (int i = 0; i < M; ++i) {
    const auto row = tt.row(i);
    double sum = 0.0;
    for (int j = 0; j < M; ++j) sum += sigma[static_cast<std::size_t>(j)] * area / row[static_cast<std::size_t>(j)];
    acc[static_cast<std::size_t>(i)] = sum;
  }
  return acc;
}

double AccessibilityField::total_population() const {
  return std::accumulate(population.begin(), population.end(), 0.0);
}

namespace {

struct Entry {
  double value;
  double weight;
};

// Positive-weight entries sorted by value (stable w.r.t. tile order).
std::vector<Entry> sorted_entries(const AccessibilityField& f) {
  if (f.acc.size() != f.population.size()) throw_invalid("accessibility and population sizes differ");
  std::vector<Entry> e;
  for (std::size_t i = 0; i < f.acc.size(); ++i) {
    if (f.population[i] < 0.0) throw_invalid("negative population weight");
    if (f.population[i] > 0.0) e.push_back({f.acc[i], f.population[i]});
  }
  if (e.empty()) throw_invalid("empty population");
  std::stable_sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) { return a.value < b.value; });
  return e;
}

// Sum of value * weight over the lowest `mass` residents.
double lower_mass_sum(const std::vector<Entry>& e, double mass) {
  double taken = 0.0, sum = 0.0;
  for (const auto& x : e) {
    if (taken >= mass) break;
    const double w = std::min(x.weight, mass - taken);
    sum += w * x.value;
    taken += w;
  }
  return sum;
}

double weighted_mean(const std::vector<Entry>& e, double* total_weight) {
  double w = 0.0, s = 0.0;
  for (const auto& x : e) {
    w += x.weight;
    s += x.weight * x.value;
  }
  if (total_weight) *total_weight = w;
  return s / w;
}

void require_positive(const std::vector<Entry>& e, const char* what) {
  for (const auto& x : e)
    if (!(x.value > 0.0)) throw_invalid(fmt::format("{} needs strictly positive accessibility", what));
}

}  // namespace

double bottom_m_accessibility(const AccessibilityField& field, double m_percent) {
  if (!(m_percent > 0.0) || m_percent > 100.0) throw_invalid("m must lie in (0, 100]");
  const auto e = sorted_entries(field);
  double total = 0.0;
  weighted_mean(e, &total);
  const double mass = std::min(total, std::ceil(m_percent / 100.0 * total - 1e-9));
  if (!(mass > 0.0)) return e.front().value;
  return lower_mass_sum(e, mass) / mass;
}

double mean_accessibility(const AccessibilityField& field) { return weighted_mean(sorted_entries(field), nullptr); }

double atkinson(const AccessibilityField& field) {
  const auto e = sorted_entries(field);
  require_positive(e, "Atkinson index");
  double total = 0.0;
  const double mu = weighted_mean(e, &total);
  double inv = 0.0;
  for (const auto& x : e) inv += x.weight / x.value;
  const double harmonic = total / inv;
  return std::max(0.0, 1.0 - harmonic / mu);
}

double theil(const AccessibilityField& field) {
  const auto e = sorted_entries(field);
  require_positive(e, "Theil index");
  double total = 0.0;
  const double mu = weighted_mean(e, &total);
  double s = 0.0;
  for (const auto& x : e) {
    const double r = x.value / mu;
    s += x.weight * r * std::log(r);
  }
  return std::max(0.0, s / total);
}

double pietra(const AccessibilityField& field) {
  const auto e = sorted_entries(field);
  double total = 0.0;
  const double mu = weighted_mean(e, &total);
  if (!(mu > 0.0)) throw_invalid("Pietra index needs a positive mean");
  double s = 0.0;
  for (const auto& x : e) s += x.weight * std::abs(x.value - mu);
  return s / (2.0 * total * mu);
}

std::optional<double> palma(const AccessibilityField& field) {
  const auto e = sorted_entries(field);
  double total = 0.0;
  weighted_mean(e, &total);
  if (total < 10.0) return std::nullopt;
  const double bottom = lower_mass_sum(e, 0.4 * total);
  // Top decile: everything minus the lowest 90%.
  double all = 0.0;
  for (const auto& x : e) all += x.weight * x.value;
  const double top = all - lower_mass_sum(e, 0.9 * total);
  if (!(bottom > 0.0)) return std::nullopt;
  return top / bottom;
}

InequalityReport inequality_suite(const AccessibilityField& field, std::span<const double> m_values) {
  InequalityReport r;
  r.atkinson = atkinson(field);
  r.theil = theil(field);
  r.pietra = pietra(field);
  r.palma = palma(field);
  r.mean = mean_accessibility(field);
  for (double m : m_values) r.bottom_m[m] = bottom_m_accessibility(field, m);
  return r;
}

}  // namespace drtplan
