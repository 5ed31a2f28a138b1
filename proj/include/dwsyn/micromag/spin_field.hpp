#pragma once

#include <iosfwd>
#include <vector>

#include "dwsyn/micromag/material.hpp"
#include "dwsyn/vec3.hpp"

namespace dwsyn::micromag {

/// Unit magnetization on the cell grid, row-major (iy * nx + ix).
struct SpinField {
  WireGeometry geometry;
  std::vector<Vec3> m;
  double time_ns = 0.0;

  SpinField() = default;
  SpinField(const WireGeometry& g, const Vec3& fill);

  int nx() const { return geometry.nx(); }
  int ny() const { return geometry.ny(); }
  Vec3& at(int ix, int iy) { return m[static_cast<std::size_t>(iy) * nx() + ix]; }
  const Vec3& at(int ix, int iy) const { return m[static_cast<std::size_t>(iy) * nx() + ix]; }

  /// Largest | |m| - 1 | over all cells.
  double max_norm_error() const;
  void renormalize();
  bool all_finite() const;

  /// Spatial average of m_z, optionally restricted to columns [x_lo, x_hi) in nm.
  double mean_mz() const;
  double mean_mz(double x_lo_nm, double x_hi_nm) const;

  /// m_z averaged over each column (across the width), one entry per ix.
  std::vector<double> column_mz_profile() const;
};

/// Writes "x,y,mx,my,mz" rows (nm for coordinates) for offline plotting.
void write_field_table(std::ostream& out, const SpinField& field);

}  // namespace dwsyn::micromag
