#include "dwsyn/micromag/material.hpp"

#include <cmath>
#include <string>

#include "dwsyn/errors.hpp"

namespace dwsyn::micromag {

namespace {

bool is_multiple(double value, double unit) {
  const double ratio = value / unit;
  return std::abs(ratio - std::round(ratio)) < 1e-9;
}

}  // namespace

void MaterialParams::validate() const {
  if (!(exchange_A > 0.0) || !(anisotropy_K > 0.0) || !(saturation_Ms > 0.0)) {
    throw InvalidParameter("A, K and Ms must be positive");
  }
  if (!(gilbert_alpha > 0.0 && gilbert_alpha < 1.0)) {
    throw InvalidParameter("gilbert_alpha must lie in (0, 1)");
  }
  if (!(nonadiabatic_beta >= 0.0 && nonadiabatic_beta < 1.0)) {
    throw InvalidParameter("nonadiabatic_beta must lie in [0, 1)");
  }
  if (!(polarization_P > 0.0 && polarization_P <= 1.0)) {
    throw InvalidParameter("polarization_P must lie in (0, 1]");
  }
  if (!(gyromagnetic_gamma > 0.0) || !(hall_R_max > 0.0)) {
    throw InvalidParameter("gamma and hall_R_max must be positive");
  }
  if (!(effective_anisotropy() > 0.0)) {
    throw InvalidParameter("shape anisotropy along z exceeds K");
  }
}

double MaterialParams::stt_velocity(double current_density) const {
  return polarization_P * current_density * constants::kBohrMagneton /
         (constants::kElementaryCharge * saturation_Ms);
}

double MaterialParams::effective_anisotropy() const {
  return anisotropy_K - 0.5 * constants::kMu0 * saturation_Ms * saturation_Ms * demag_factors.z;
}

double MaterialParams::wall_width_nm() const {
  return std::sqrt(exchange_A / effective_anisotropy()) * 1e9;
}

void WireGeometry::validate() const {
  if (!(cell_nm > 0.0) || !(length_nm > 0.0) || !(width_nm > 0.0) || !(thickness_nm > 0.0)) {
    throw InvalidGeometry("wire dimensions and cell size must be positive");
  }
  if (!is_multiple(length_nm, cell_nm) || !is_multiple(width_nm, cell_nm)) {
    throw InvalidGeometry("length and width must be integer multiples of the cell size (" +
                          std::to_string(cell_nm) + " nm)");
  }
  if (nx() * ny() <= 0) {
    throw InvalidGeometry("wire has no cells");
  }
}

int WireGeometry::nx() const {
  return cell_nm > 0.0 ? static_cast<int>(std::lround(length_nm / cell_nm)) : 0;
}

int WireGeometry::ny() const {
  return cell_nm > 0.0 ? static_cast<int>(std::lround(width_nm / cell_nm)) : 0;
}

void DriveSpec::validate() const {
  if (!(pulse_ns > 0.0)) throw InvalidParameter("pulse duration must be positive");
  if (!(relax_ns >= 0.0)) throw InvalidParameter("relax duration must be non-negative");
  if (!std::isfinite(current_density)) throw InvalidParameter("current density must be finite");
}

}  // namespace dwsyn::micromag
