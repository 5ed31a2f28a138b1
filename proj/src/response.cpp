#include "dwsyn/device/response.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>

#include "dwsyn/errors.hpp"
#include "dwsyn/parallel.hpp"
#include "dwsyn/micromag/wall.hpp"

namespace dwsyn::device {

long expected_pulse_count(const WireModel& wire, const micromag::DriveSpec& drive) {
  const auto& g = wire.grains->geometry;
  const double travel = saturated_start_nm(g, true) - saturated_start_nm(g, false);
  const auto& p = wire.params;
  const double v = p.nonadiabatic_beta / p.gilbert_alpha * std::abs(p.stt_velocity(drive.current_density));
  const double per_pulse = v * drive.pulse_ns;  // m/s * ns = nm
  if (!(per_pulse > 0.0)) throw InvalidParameter("drive does not move a clean wall");
  return std::max(1L, static_cast<long>(std::ceil(travel / per_pulse)));
}

namespace {

// Returns false when the sweep stalled: over `stall_pulses` pulses either the reading
// barely moved or it set no new extreme in the push direction (a pinned wall can
// rock back and forth under each pulse without getting anywhere).
bool sweep(MicromagBackend& backend, int direction, long max_pulses, const RecordOptions& options,
           std::vector<double>& out) {
  out.assign(1, backend.resistance());
  const double target = direction * kFullScaleMilliOhm;
  double best = direction * out.back();
  long last_gain = 0;
  for (long k = 0; k < max_pulses; ++k) {
    if ((direction > 0 && out.back() >= target) || (direction < 0 && out.back() <= target)) return true;
    backend.pulse(direction);
    out.push_back(backend.resistance());
    if (direction * out.back() >= best + options.stall_tolerance_mohm) {
      best = direction * out.back();
      last_gain = k + 1;
    }
    if (options.stall_pulses > 0 && k + 1 - last_gain >= options.stall_pulses) return false;
    const auto window = static_cast<std::size_t>(options.stall_pulses);
    if (options.stall_pulses > 0 && out.size() > window) {
      const auto [lo, hi] = std::minmax_element(out.end() - static_cast<long>(window) - 1, out.end());
      if (*hi - *lo < options.stall_tolerance_mohm) return false;
    }
  }
  return (direction > 0 && out.back() >= target) || (direction < 0 && out.back() <= target);
}

}  // namespace

DeviceResponseTrace record_response_trace(const WireModel& wire, const micromag::DriveSpec& drive,
                                          int device_id, const RecordOptions& options) {
  if (!wire.grains) throw InvalidParameter("wire model has no grain map");
  const long budget = static_cast<long>(std::ceil(options.budget_factor * expected_pulse_count(wire, drive)));
  DeviceResponseTrace trace;
  trace.device_id = device_id;
  trace.delta_theta_deg = wire.grains->delta_theta_deg;
  trace.seed = wire.grains->seed;

  MicromagBackend backend(wire, drive, false);
  bool ok = sweep(backend, 1, budget, options, trace.forward);
  backend.reset(true);
  ok = sweep(backend, -1, budget, options, trace.backward) && ok;
  trace.complete = ok;
  if (!ok && options.throw_on_stuck) {
    throw StuckDevice("device " + std::to_string(device_id) + " stopped responding before saturating");
  }
  if (trace.forward.size() + trace.backward.size() >= 3) trace.slope_mohm_per_pulse = calibrate(trace);
  return trace;
}

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("x and y differ in length");
  if (x.size() < 2) throw InsufficientData("a line needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("all x values coincide");
  return {sxy / sxx, my - sxy / sxx * mx};
}

double calibrate(const DeviceResponseTrace& trace) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < trace.forward.size(); ++k) {
    x.push_back(static_cast<double>(k));
    y.push_back(trace.forward[k]);
  }
  for (std::size_t k = 0; k < trace.backward.size(); ++k) {
    x.push_back(static_cast<double>(k));
    y.push_back(-trace.backward[k]);
  }
  if (x.size() < 3) throw InsufficientData("calibration needs at least 3 points");
  return least_squares_line(x, y).slope;
}

std::vector<DeviceResponseTrace> generate_library(
    const micromag::MaterialParams& params, const micromag::WireGeometry& geometry,
    double delta_theta_deg, const std::vector<std::uint64_t>& seeds, const micromag::DriveSpec& drive,
    const micromag::SolverOptions& solver, int workers,
    const std::function<void(const DeviceResponseTrace&)>& progress) {
  std::vector<DeviceResponseTrace> out(seeds.size());
  std::mutex report;
  parallel_for(seeds.size(), workers, [&](std::size_t i) {
    WireModel wire{params,
                   std::make_shared<const micromag::GrainMap>(
                       micromag::generate_voronoi_grains(geometry, 10.0, delta_theta_deg, seeds[i])),
                   solver};
    RecordOptions options;
    options.throw_on_stuck = false;
    out[i] = record_response_trace(wire, drive, static_cast<int>(i), options);
    std::lock_guard lock(report);
    if (progress) progress(out[i]);
  });
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("bad number in device library: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

void write_library(std::ostream& out, const std::vector<DeviceResponseTrace>& traces) {
  out << "# domain-wall device library: per device a summary line, then R_H (mOhm) after each pulse\n";
  for (const auto& t : traces) {
    out << "device," << t.device_id << ',' << fmt(t.delta_theta_deg) << ',' << t.seed << ','
        << fmt(t.slope_mohm_per_pulse) << ',' << (t.complete ? 1 : 0) << '\n';
    out << "pulse_index,R_H_forward,R_H_backward\n";
    const std::size_t rows = std::max(t.forward.size(), t.backward.size());
    for (std::size_t k = 0; k < rows; ++k) {
      out << k << ',';
      if (k < t.forward.size()) out << fmt(t.forward[k]);
      out << ',';
      if (k < t.backward.size()) out << fmt(t.backward[k]);
      out << '\n';
    }
    out << '\n';
  }
}

std::vector<DeviceResponseTrace> read_library(std::istream& in) {
  std::vector<DeviceResponseTrace> traces;
  std::string line;
  DeviceResponseTrace* cur = nullptr;
  bool forward_open = false, backward_open = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.front() == "device") {
      if (cells.size() != 6) throw DataError("device line needs 6 fields: " + line);
      DeviceResponseTrace t;
      t.device_id = std::stoi(cells[1]);
      t.delta_theta_deg = parse_double(cells[2]);
      t.seed = std::stoull(cells[3]);
      t.slope_mohm_per_pulse = parse_double(cells[4]);
      t.complete = cells[5] == "1";
      traces.push_back(std::move(t));
      cur = &traces.back();
      forward_open = backward_open = true;
      continue;
    }
    if (cells.front() == "pulse_index") continue;
    if (!cur) throw DataError("staircase row before any device line");
    if (cells.size() != 3) throw DataError("staircase row needs 3 fields: " + line);
    if (static_cast<std::size_t>(std::stoul(cells[0])) != std::max(cur->forward.size(), cur->backward.size())) {
      throw DataError("pulse indices must be consecutive: " + line);
    }
    auto take = [&](const std::string& cell, std::vector<double>& dst, bool& open) {
      if (cell.empty()) {
        open = false;
        return;
      }
      if (!open) throw DataError("staircase resumes after it ended: " + line);
      dst.push_back(parse_double(cell));
    };
    take(cells[1], cur->forward, forward_open);
    take(cells[2], cur->backward, backward_open);
  }
  return traces;
}

double position_from_resistance(double r_mohm, double length_nm, double hall_r_max) {
  return 0.5 * length_nm * (1.0 + r_mohm / hall_r_max);
}

}  // namespace dwsyn::device
