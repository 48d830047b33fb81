#pragma once

namespace drtplan {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct BoundingBox {
  double lat_min = 0.0;
  double lon_min = 0.0;
  double lat_max = 0.0;
  double lon_max = 0.0;

  bool contains(const LatLon& p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
  LatLon center() const { return {(lat_min + lat_max) / 2.0, (lon_min + lon_max) / 2.0}; }
};

// Planar point in km, east (x) / north (y) of a projection origin.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

// Great-circle (haversine) distance in km.
double great_circle_km(const LatLon& a, const LatLon& b);

// Local equirectangular projection about a fixed origin. Accurate to well
// under a tile size at city scale.
class LocalProjection {
 public:
  LocalProjection() = default;
  explicit LocalProjection(LatLon origin);

  PlanarPoint forward(const LatLon& p) const;
  LatLon inverse(const PlanarPoint& p) const;
  const LatLon& origin() const { return origin_; }

 private:
  LatLon origin_{};
  double cos_lat0_ = 1.0;
};

}  // namespace drtplan
