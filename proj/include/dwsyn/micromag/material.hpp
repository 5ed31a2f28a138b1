#pragma once

#include "dwsyn/vec3.hpp"

namespace dwsyn::micromag {

namespace constants {
inline constexpr double kMu0 = 1.25663706212e-6;        // T·m/A
inline constexpr double kBohrMagneton = 9.2740100783e-24;  // J/T
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kGyromagneticRatio = 1.7595e11;  // rad/(s·T)
}  // namespace constants

/// Hall readings are clipped to this magnitude (mΩ). It corresponds to the
/// ±0.9 Ms boundary the device keeps the wall inside of.
inline constexpr double kHallClipMilliOhm = 195.0;

/// Magnetic and transport parameters of the CoFeB strip.
///
/// Defaults are the CoFeB values (A, K, Ms, Hall maximum). Damping, nonadiabaticity and
/// polarization are not measured quantities here. The defaults put u = PJμB/eMs above
/// the wall's intrinsic threshold at the training current, with β < α, so that 8°
/// disorder slows the wall at grain boundaries without pinning it for good; β = α or
/// heavier damping leaves most disordered wires stuck at 2×10¹² A/m².
///
/// `demag_factors` is a local (diagonal) shape-anisotropy approximation,
/// H = -Ms (Nx mx, Ny my, Nz mz). Its x entry is the Bloch/Néel hard axis of the
/// wall; without it the wall has no Walker regime at all. Nz defaults to zero
/// so that K enters exactly as given.
struct MaterialParams {
  double exchange_A = 3e-11;      // J/m
  double anisotropy_K = 8e5;      // J/m³
  double saturation_Ms = 8e5;     // A/m
  double gilbert_alpha = 0.15;
  double nonadiabatic_beta = 0.075;
  double polarization_P = 1.0;
  double gyromagnetic_gamma = constants::kGyromagneticRatio;  // rad·s⁻¹·T⁻¹
  double hall_R_max = 215.0;      // mΩ at full saturation
  Vec3 demag_factors{0.2, 0.0, 0.0};
  Vec3 external_field{};          // A/m

  /// Throws InvalidParameter when an invariant is violated.
  void validate() const;

  /// γμ0, the precession rate per unit field in A/m (m/(A·s)).
  double gamma_mu0() const { return gyromagnetic_gamma * constants::kMu0; }

  /// STT velocity u = P J μB / (e Ms) in m/s for a current density in A/m².
  double stt_velocity(double current_density) const;

  /// K - μ0 Ms² Nz / 2, the anisotropy that sets the wall width.
  double effective_anisotropy() const;

  /// Bloch-wall width parameter sqrt(A / K_eff) in nm.
  double wall_width_nm() const;
};

/// Rectangular strip discretized into square in-plane cells, one cell thick.
struct WireGeometry {
  double length_nm = 2000.0;
  double width_nm = 80.0;
  double thickness_nm = 6.0;
  double cell_nm = 4.0;

  /// Throws InvalidGeometry when dimensions are not whole multiples of the cell
  /// or the cell count is zero.
  void validate() const;

  int nx() const;
  int ny() const;
  int cell_count() const { return nx() * ny(); }
  double cell_volume_m3() const { return cell_nm * cell_nm * thickness_nm * 1e-27; }
  double cell_center_x_nm(int ix) const { return (ix + 0.5) * cell_nm; }
  double cell_center_y_nm(int iy) const { return (iy + 0.5) * cell_nm; }

  friend bool operator==(const WireGeometry&, const WireGeometry&) = default;
};

/// One current pulse followed by zero-current relaxation.
struct DriveSpec {
  double current_density = 2e12;  // A/m², sign sets the direction along x
  double pulse_ns = 0.5;
  double relax_ns = 0.5;

  void validate() const;
};

}  // namespace dwsyn::micromag
