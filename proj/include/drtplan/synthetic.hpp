#pragma once

#include <cstdint>
#include <filesystem>

#include "drtplan/tessellation.hpp"
#include "drtplan/transit.hpp"

namespace drtplan {

// A square test city: rows x cols tiles of 1 km around a reference
// latitude, one east-west and one north-south line crossing at the centre,
// population denser towards the centre with seeded noise.
struct SyntheticCityOptions {
  int rows = 10;
  int cols = 10;
  double tile_length_km = 1.0;
  LatLon center{45.50, -73.60};
  std::uint64_t seed = 7;
  double pop_min = 20.0;  // people per tile before the centre boost
  double pop_max = 120.0;
  double center_boost = 1.5;
  double center_sigma_km = 3.0;
  double station_spacing_km = 1.5;
  double headway_min = 4.0;
  double speed_kmh = 30.0;  // line running speed
  double dwell_min = 0.5;
};

struct SyntheticCity {
  BoundingBox bbox;
  PopulationSource population;  // pre-binned cells
  TransitNetwork network;
};

SyntheticCity make_synthetic_city(const SyntheticCityOptions& options = {});

// Writes gtfs/{stops,routes,trips,stop_times}.txt, population.csv and a
// scenario.json (default parameters, fleet size 0) into `dir`.
void write_synthetic_city(const std::filesystem::path& dir, const SyntheticCityOptions& options = {});

}  // namespace drtplan
