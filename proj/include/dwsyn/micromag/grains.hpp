#pragma once

#include <cstdint>
#include <vector>

#include "dwsyn/micromag/material.hpp"
#include "dwsyn/vec3.hpp"

namespace dwsyn::micromag {

/// Polycrystalline easy-axis disorder: every cell belongs to a Voronoi grain and
/// inherits that grain's (tilted) anisotropy axis.
struct GrainMap {
  WireGeometry geometry;
  std::vector<Vec3> cell_axes;      // one unit vector per cell, row-major (iy * nx + ix)
  std::vector<int> grain_ids;       // dense ids 0..grain_count-1
  std::vector<double> grain_tilt_deg;  // polar tilt of each grain's axis
  int grain_count = 0;
  double delta_theta_deg = 0.0;
  double mean_diameter_nm = 10.0;
  std::uint64_t seed = 0;
};

/// Builds the grain map for a wire. Seeds are Poisson-distributed at density
/// 1/mean_diameter²; cells join the nearest seed; each grain's axis is +z tilted by
/// |Normal(0, delta_theta)| at a uniform azimuth. Grains that capture no cell are
/// dropped and ids are renumbered in order of first appearance.
GrainMap generate_voronoi_grains(const WireGeometry& geometry, double mean_diameter_nm,
                                 double delta_theta_deg, std::uint64_t seed);

/// A perfect wire: one grain, every axis exactly +z.
GrainMap uniform_grains(const WireGeometry& geometry);

}  // namespace dwsyn::micromag
