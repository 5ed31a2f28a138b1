#include "dwsyn/micromag/wall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dwsyn/errors.hpp"

namespace dwsyn::micromag {

SpinField domain_wall_ansatz(const WireGeometry& geometry, const MaterialParams& params,
                             double wall_x_nm, bool up_on_left) {
  geometry.validate();
  if (!(wall_x_nm > 0.0 && wall_x_nm < geometry.length_nm)) {
    throw InvalidParameter("wall position must lie strictly inside the wire");
  }
  const double width = params.wall_width_nm();
  const double sign = up_on_left ? 1.0 : -1.0;
  SpinField field(geometry, Vec3{0.0, 0.0, 1.0});
  for (int iy = 0; iy < field.ny(); ++iy) {
    for (int ix = 0; ix < field.nx(); ++ix) {
      const double s = (geometry.cell_center_x_nm(ix) - wall_x_nm) / width;
      field.at(ix, iy) = normalized(Vec3{0.0, 1.0 / std::cosh(s), -sign * std::tanh(s)});
    }
  }
  return field;
}

SpinField init_domain_wall(LlgSolver& solver, double wall_x_nm, bool up_on_left,
                           double relax_tolerance, double relax_max_ns) {
  SpinField field =
      domain_wall_ansatz(solver.grains().geometry, solver.params(), wall_x_nm, up_on_left);
  solver.relax(field, relax_tolerance, relax_max_ns);
  field.time_ns = 0.0;
  return field;
}

void apply_current_pulse(LlgSolver& solver, SpinField& field, const DriveSpec& drive) {
  drive.validate();
  solver.run(field, drive.current_density, drive.pulse_ns);
  solver.run(field, 0.0, drive.relax_ns);
}

double wall_position(const SpinField& field) {
  const auto profile = field.column_mz_profile();
  const double dx = field.geometry.cell_nm;
  std::vector<double> crossings;
  for (std::size_t i = 1; i < profile.size(); ++i) {
    const double a = profile[i - 1];
    const double b = profile[i];
    if (a == 0.0 && i == 1) crossings.push_back(field.geometry.cell_center_x_nm(0));
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
      if (b == 0.0 && i + 1 < profile.size() && ((profile[i + 1] > 0.0) == (a > 0.0))) continue;
      const double frac = a / (a - b);
      crossings.push_back(field.geometry.cell_center_x_nm(static_cast<int>(i - 1)) + frac * dx);
    }
  }
  if (crossings.empty()) throw SaturatedState("no domain wall: m_z profile does not change sign");
  if (crossings.size() == 1) return crossings.front();

  const double length = field.geometry.length_nm;
  const double mean = field.mean_mz();
  const double implied = profile.front() > 0.0 ? 0.5 * length * (1.0 + mean) : 0.5 * length * (1.0 - mean);
  return *std::min_element(crossings.begin(), crossings.end(), [&](double l, double r) {
    return std::abs(l - implied) < std::abs(r - implied);
  });
}

double hall_resistance_from_mz(double mean_mz, const MaterialParams& params) {
  return std::clamp(params.hall_R_max * mean_mz, -kHallClipMilliOhm, kHallClipMilliOhm);
}

double hall_resistance(const SpinField& field, const MaterialParams& params,
                       std::optional<HallWindow> window) {
  const double mz = window ? field.mean_mz(window->x_lo_nm, window->x_hi_nm) : field.mean_mz();
  return hall_resistance_from_mz(mz, params);
}

namespace {

double default_start(const WireGeometry& g, double requested, double current_density) {
  if (requested > 0.0) return requested;
  return current_density >= 0.0 ? 0.25 * g.length_nm : 0.75 * g.length_nm;
}

void guard_boundary(const SpinField& field, double position, int guard_cells) {
  const double guard = guard_cells * field.geometry.cell_nm;
  if (position < guard || position > field.geometry.length_nm - guard) {
    throw BoundaryHit("domain wall reached the wire boundary during measurement");
  }
}

}  // namespace

double measure_velocity(LlgSolver& solver, double current_density, double settle_ns,
                        double measure_ns, const VelocityOptions& options) {
  if (!(measure_ns > 0.0) || settle_ns < 0.0) throw InvalidParameter("invalid measurement window");
  const auto& g = solver.grains().geometry;
  SpinField field = init_domain_wall(
      solver, default_start(g, options.wall_start_nm, current_density), true, options.relax_tolerance);
  guard_boundary(field, wall_position(field), options.boundary_guard_cells);

  auto advance = [&](double duration) {
    const double chunk = 0.1;
    double done = 0.0;
    while (done < duration - 1e-12) {
      const double t = std::min(chunk, duration - done);
      solver.run(field, current_density, t);
      done += t;
      double x;
      try {
        x = wall_position(field);
      } catch (const SaturatedState&) {
        throw BoundaryHit("domain wall left the wire during measurement");
      }
      guard_boundary(field, x, options.boundary_guard_cells);
    }
  };
  advance(settle_ns);
  const double x0 = wall_position(field);
  const double t0 = field.time_ns;
  advance(measure_ns);
  const double x1 = wall_position(field);
  return (x1 - x0) / (field.time_ns - t0);  // nm/ns == m/s
}

bool wall_moves(LlgSolver& solver, const SpinField& relaxed_start, double current_density,
                const CriticalCurrentOptions& options) {
  SpinField field = relaxed_start;
  const double x_start = wall_position(field);
  const double chunk = 0.1;
  const double stall_ns = 1.0;
  std::vector<double> history{x_start};
  for (double t = 0.0; t < options.budget_ns - 1e-12; t += chunk) {
    solver.run(field, current_density, chunk);
    double x;
    try {
      x = wall_position(field);
    } catch (const SaturatedState&) {
      return true;
    }
    if (std::abs(x - x_start) >= options.travel_nm) return true;
    history.push_back(x);
    // A wall that has not moved by a nanometre over the last nanosecond is pinned.
    const auto lag = static_cast<std::size_t>(std::lround(stall_ns / chunk));
    if (t + chunk >= 2.0 * stall_ns && history.size() > lag &&
        std::abs(history.back() - history[history.size() - 1 - lag]) < 1.0) {
      return false;
    }
  }
  return false;
}

double find_critical_current(LlgSolver& solver, double j_lo, double j_hi, double tolerance,
                             const CriticalCurrentOptions& options) {
  if (!(tolerance > 0.0) || !(j_hi > j_lo) || j_lo < 0.0) {
    throw BracketError("critical-current bracket must satisfy 0 <= j_lo < j_hi and tol > 0");
  }
  const auto& g = solver.grains().geometry;
  const SpinField start =
      init_domain_wall(solver, default_start(g, options.wall_start_nm, 1.0), true, options.relax_tolerance);
  if (wall_moves(solver, start, j_lo, options)) {
    throw BracketError("wall already moves at the lower bracket current");
  }
  if (!wall_moves(solver, start, j_hi, options)) {
    throw BracketError("wall is still pinned at the upper bracket current");
  }
  double lo = j_lo;
  double hi = j_hi;
  while (hi - lo >= tolerance) {
    const double mid = 0.5 * (lo + hi);
    (wall_moves(solver, start, mid, options) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dwsyn::micromag
