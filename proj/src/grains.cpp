#include "dwsyn/micromag/grains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dwsyn/errors.hpp"

namespace dwsyn::micromag {

namespace {

struct Seed {
  double x;
  double y;
};

// Bucketed nearest-seed lookup; buckets are one mean diameter wide.
class SeedGrid {
 public:
  SeedGrid(const std::vector<Seed>& seeds, double length, double width, double bucket)
      : seeds_(seeds), bucket_(bucket) {
    bx_ = std::max(1, static_cast<int>(std::ceil(length / bucket)));
    by_ = std::max(1, static_cast<int>(std::ceil(width / bucket)));
    cells_.resize(static_cast<std::size_t>(bx_) * by_);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      cells_[index(bucket_of(seeds[i].x, bx_), bucket_of(seeds[i].y, by_))].push_back(static_cast<int>(i));
    }
  }

  int nearest(double x, double y) const {
    const int cx = bucket_of(x, bx_);
    const int cy = bucket_of(y, by_);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int ring = 0;; ++ring) {
      for (int gy = cy - ring; gy <= cy + ring; ++gy) {
        for (int gx = cx - ring; gx <= cx + ring; ++gx) {
          if (std::max(std::abs(gx - cx), std::abs(gy - cy)) != ring) continue;
          if (gx < 0 || gy < 0 || gx >= bx_ || gy >= by_) continue;
          for (int s : cells_[index(gx, gy)]) {
            const double dx = seeds_[s].x - x;
            const double dy = seeds_[s].y - y;
            const double d2 = dx * dx + dy * dy;
            // ties resolve to the lower seed index so the result is order independent
            if (d2 < best_d2 || (d2 == best_d2 && s < best)) {
              best_d2 = d2;
              best = s;
            }
          }
        }
      }
      // every seed outside the scanned rings is at least ring * bucket away
      if (best >= 0 && best_d2 <= std::pow(ring * bucket_, 2)) return best;
      if (ring > bx_ + by_) return best;
    }
  }

 private:
  int bucket_of(double v, int n) const {
    return std::clamp(static_cast<int>(v / bucket_), 0, n - 1);
  }
  std::size_t index(int gx, int gy) const { return static_cast<std::size_t>(gy) * bx_ + gx; }

  const std::vector<Seed>& seeds_;
  double bucket_;
  int bx_ = 1;
  int by_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace

GrainMap generate_voronoi_grains(const WireGeometry& geometry, double mean_diameter_nm,
                                 double delta_theta_deg, std::uint64_t seed) {
  geometry.validate();
  if (!(mean_diameter_nm >= geometry.cell_nm)) {
    throw InvalidParameter("grain diameter must be at least one cell");
  }
  if (!(delta_theta_deg >= 0.0)) throw InvalidParameter("delta_theta must be non-negative");

  std::mt19937_64 rng(seed);
  const double area = geometry.length_nm * geometry.width_nm;
  std::poisson_distribution<int> count_dist(area / (mean_diameter_nm * mean_diameter_nm));
  const int n_seeds = std::max(1, count_dist(rng));
  std::uniform_real_distribution<double> ux(0.0, geometry.length_nm);
  std::uniform_real_distribution<double> uy(0.0, geometry.width_nm);
  std::vector<Seed> seeds(static_cast<std::size_t>(n_seeds));
  for (auto& s : seeds) {
    s.x = ux(rng);
    s.y = uy(rng);
  }

  GrainMap map;
  map.geometry = geometry;
  map.delta_theta_deg = delta_theta_deg;
  map.mean_diameter_nm = mean_diameter_nm;
  map.seed = seed;

  const int nx = geometry.nx();
  const int ny = geometry.ny();
  SeedGrid grid(seeds, geometry.length_nm, geometry.width_nm, mean_diameter_nm);
  std::vector<int> dense(seeds.size(), -1);
  map.grain_ids.resize(static_cast<std::size_t>(nx) * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int s = grid.nearest(geometry.cell_center_x_nm(ix), geometry.cell_center_y_nm(iy));
      if (dense[s] < 0) dense[s] = map.grain_count++;
      map.grain_ids[static_cast<std::size_t>(iy) * nx + ix] = dense[s];
    }
  }

  // Tilts are drawn per dense grain id so they depend only on the seed.
  std::normal_distribution<double> tilt_dist(0.0, 1.0);
  std::uniform_real_distribution<double> azimuth_dist(0.0, 2.0 * std::numbers::pi);
  std::vector<Vec3> grain_axes(static_cast<std::size_t>(map.grain_count));
  map.grain_tilt_deg.resize(grain_axes.size());
  for (std::size_t g = 0; g < grain_axes.size(); ++g) {
    const double tilt_deg = std::abs(delta_theta_deg * tilt_dist(rng));
    const double azimuth = azimuth_dist(rng);
    map.grain_tilt_deg[g] = tilt_deg;
    if (tilt_deg == 0.0) {
      grain_axes[g] = {0.0, 0.0, 1.0};
      continue;
    }
    const double theta = tilt_deg * std::numbers::pi / 180.0;
    grain_axes[g] = normalized(Vec3{std::sin(theta) * std::cos(azimuth),
                                    std::sin(theta) * std::sin(azimuth), std::cos(theta)});
  }
  map.cell_axes.resize(map.grain_ids.size());
  for (std::size_t c = 0; c < map.grain_ids.size(); ++c) {
    map.cell_axes[c] = grain_axes[static_cast<std::size_t>(map.grain_ids[c])];
  }
  return map;
}

GrainMap uniform_grains(const WireGeometry& geometry) {
  geometry.validate();
  GrainMap map;
  map.geometry = geometry;
  map.grain_count = 1;
  map.grain_tilt_deg = {0.0};
  map.cell_axes.assign(static_cast<std::size_t>(geometry.cell_count()), Vec3{0.0, 0.0, 1.0});
  map.grain_ids.assign(map.cell_axes.size(), 0);
  return map;
}

}  // namespace dwsyn::micromag
