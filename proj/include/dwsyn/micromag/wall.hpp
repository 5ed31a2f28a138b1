#pragma once

#include <functional>
#include <optional>

#include "dwsyn/micromag/grains.hpp"
#include "dwsyn/micromag/llg.hpp"
#include "dwsyn/micromag/material.hpp"
#include "dwsyn/micromag/spin_field.hpp"

namespace dwsyn::micromag {

/// Bloch-wall ansatz at `wall_x_nm` (tanh profile in m_z, sech in m_y), then relaxed.
/// With `up_on_left` the left domain points +z. Relaxation uses the given solver's
/// material and grains.
SpinField init_domain_wall(LlgSolver& solver, double wall_x_nm, bool up_on_left,
                           double relax_tolerance = 1e-4, double relax_max_ns = 100.0);

/// Unrelaxed ansatz only.
SpinField domain_wall_ansatz(const WireGeometry& geometry, const MaterialParams& params,
                             double wall_x_nm, bool up_on_left);

/// Pulse of `drive.current_density` for `drive.pulse_ns`, then zero current for
/// `drive.relax_ns`, all under the physical LLG dynamics.
void apply_current_pulse(LlgSolver& solver, SpinField& field, const DriveSpec& drive);

/// Position (nm) where the width-averaged m_z profile crosses zero, linearly
/// interpolated between cell centers. Among several crossings the one closest to
/// the position implied by ⟨m_z⟩ wins. Throws SaturatedState without a crossing.
double wall_position(const SpinField& field);

/// Readout window in nm along x; an empty optional means the whole wire.
struct HallWindow {
  double x_lo_nm = 0.0;
  double x_hi_nm = 0.0;
};

/// R_H = hall_R_max ⟨m_z⟩, clipped to ±195 mΩ.
double hall_resistance(const SpinField& field, const MaterialParams& params,
                       std::optional<HallWindow> window = std::nullopt);
double hall_resistance_from_mz(double mean_mz, const MaterialParams& params);

struct VelocityOptions {
  double wall_start_nm = -1.0;  // negative: 25% of the wire length (mirrored for J < 0)
  int boundary_guard_cells = 10;
  double relax_tolerance = 1e-4;
};

/// Steady wall velocity (m/s) under a constant current: relax a wall, drive for
/// `settle_ns`, then time the displacement over `measure_ns`. Throws BoundaryHit if
/// the wall comes within the guard distance of either end.
double measure_velocity(LlgSolver& solver, double current_density, double settle_ns,
                        double measure_ns, const VelocityOptions& options = {});

struct CriticalCurrentOptions {
  double travel_nm = 200.0;    // "moves" means at least this far
  double budget_ns = 10.0;     // within this much simulated time
  double wall_start_nm = -1.0; // negative: 25% of the wire length
  double relax_tolerance = 1e-4;
};

/// True when the wall travels at least `travel_nm` within the budget at J.
bool wall_moves(LlgSolver& solver, const SpinField& relaxed_start, double current_density,
                const CriticalCurrentOptions& options);

/// Bisection for the depinning current density (A/m²). Throws BracketError unless
/// the wall is pinned at j_lo and moving at j_hi.
double find_critical_current(LlgSolver& solver, double j_lo, double j_hi, double tolerance,
                             const CriticalCurrentOptions& options = {});

}  // namespace dwsyn::micromag
