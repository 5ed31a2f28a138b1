#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "dwsyn/device/synapse.hpp"

namespace dwsyn::device {

struct RecordOptions {
  /// Hard pulse cap per sweep, as a multiple of the clean-wire estimate
  /// (travel / ((β/α) u · pulse length)).
  double budget_factor = 10.0;
  /// A sweep is stuck when, over this many consecutive pulses, its reading spans less
  /// than `stall_tolerance_mohm` or never beats its best by that much. The dynamics
  /// are deterministic, so it stays stuck.
  int stall_pulses = 20;
  double stall_tolerance_mohm = 0.5;
  /// When false a stalled sweep ends the trace (marked incomplete) instead of throwing.
  bool throw_on_stuck = true;
};

/// Expected pulses to cross the wire on a clean wire at this drive.
long expected_pulse_count(const WireModel& wire, const micromag::DriveSpec& drive);

/// Sweeps single pulses from each saturated end until the opposite end saturates,
/// recording R_H after every pulse + relax. The slope is filled in by calibrate().
/// Throws StuckDevice for a stalled sweep unless options say otherwise.
DeviceResponseTrace record_response_trace(const WireModel& wire, const micromag::DriveSpec& drive,
                                          int device_id = 0, const RecordOptions& options = {});

/// Least-squares slope (mΩ/pulse) of R_H against pulse count, pooling the forward
/// sweep with the negated backward sweep. Throws InsufficientData below 3 points.
double calibrate(const DeviceResponseTrace& trace);

/// Least-squares slope and intercept through (x, y); exposed for checking calibrate.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y);

/// Records and calibrates one device per seed at the given disorder, running up to
/// `workers` devices at once. Stalled devices are kept and marked incomplete.
/// `progress` (optional) is called after each device finishes.
std::vector<DeviceResponseTrace> generate_library(
    const micromag::MaterialParams& params, const micromag::WireGeometry& geometry,
    double delta_theta_deg, const std::vector<std::uint64_t>& seeds, const micromag::DriveSpec& drive,
    const micromag::SolverOptions& solver, int workers = 1,
    const std::function<void(const DeviceResponseTrace&)>& progress = {});

/// Plain-text library. Every device is a summary line
///   device,<id>,<delta_theta_deg>,<seed>,<slope>,<complete>
/// followed by the header `pulse_index,R_H_forward,R_H_backward` and one row per
/// pulse (a cell is empty once its sweep has ended), then a blank line. Numbers are
/// written in shortest round-trip form, so reading back is bit-exact.
void write_library(std::ostream& out, const std::vector<DeviceResponseTrace>& traces);
std::vector<DeviceResponseTrace> read_library(std::istream& in);

/// Wall position implied by a reading on a wire whose left domain points up.
double position_from_resistance(double r_mohm, double length_nm, double hall_r_max);

}  // namespace dwsyn::device
