#include "drtplan/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace drtplan {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double great_circle_km(const LatLon& a, const LatLon& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = phi2 - phi1;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

LocalProjection::LocalProjection(LatLon origin)
    : origin_(origin), cos_lat0_(std::cos(origin.lat * kDegToRad)) {}

PlanarPoint LocalProjection::forward(const LatLon& p) const {
  return {kEarthRadiusKm * (p.lon - origin_.lon) * kDegToRad * cos_lat0_,
          kEarthRadiusKm * (p.lat - origin_.lat) * kDegToRad};
}

LatLon LocalProjection::inverse(const PlanarPoint& p) const {
  return {origin_.lat + p.y / kEarthRadiusKm / kDegToRad,
          origin_.lon + p.x / (kEarthRadiusKm * cos_lat0_) / kDegToRad};
}

}  // namespace drtplan
