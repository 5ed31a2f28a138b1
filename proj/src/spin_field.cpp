#include "dwsyn/micromag/spin_field.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace dwsyn::micromag {

SpinField::SpinField(const WireGeometry& g, const Vec3& fill)
    : geometry(g), m(static_cast<std::size_t>(g.cell_count()), fill) {}

double SpinField::max_norm_error() const {
  double worst = 0.0;
  for (const auto& v : m) worst = std::max(worst, std::abs(norm(v) - 1.0));
  return worst;
}

void SpinField::renormalize() {
  for (auto& v : m) v *= 1.0 / norm(v);
}

bool SpinField::all_finite() const {
  return std::all_of(m.begin(), m.end(), [](const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
  });
}

double SpinField::mean_mz() const {
  double sum = 0.0;
  for (const auto& v : m) sum += v.z;
  return m.empty() ? 0.0 : sum / static_cast<double>(m.size());
}

double SpinField::mean_mz(double x_lo_nm, double x_hi_nm) const {
  double sum = 0.0;
  long count = 0;
  for (int ix = 0; ix < nx(); ++ix) {
    const double xc = geometry.cell_center_x_nm(ix);
    if (xc < x_lo_nm || xc >= x_hi_nm) continue;
    for (int iy = 0; iy < ny(); ++iy) {
      sum += at(ix, iy).z;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

std::vector<double> SpinField::column_mz_profile() const {
  std::vector<double> profile(static_cast<std::size_t>(nx()), 0.0);
  for (int iy = 0; iy < ny(); ++iy) {
    for (int ix = 0; ix < nx(); ++ix) profile[ix] += at(ix, iy).z;
  }
  for (auto& p : profile) p /= ny();
  return profile;
}

void write_field_table(std::ostream& out, const SpinField& field) {
  out << "x,y,mx,my,mz\n";
  for (int iy = 0; iy < field.ny(); ++iy) {
    for (int ix = 0; ix < field.nx(); ++ix) {
      const Vec3& v = field.at(ix, iy);
      out << field.geometry.cell_center_x_nm(ix) << ',' << field.geometry.cell_center_y_nm(iy) << ','
          << v.x << ',' << v.y << ',' << v.z << '\n';
    }
  }
}

}  // namespace dwsyn::micromag
