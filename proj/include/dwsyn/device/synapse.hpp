#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "dwsyn/micromag/grains.hpp"
#include "dwsyn/micromag/llg.hpp"
#include "dwsyn/micromag/material.hpp"
#include "dwsyn/micromag/spin_field.hpp"

namespace dwsyn::device {

/// Weight 1 corresponds to this Hall resistance (mΩ).
inline constexpr double kFullScaleMilliOhm = 195.0;

/// A stored weight with read and incremental-write access.
class Synapse {
 public:
  virtual ~Synapse() = default;
  virtual double read_weight() const = 0;
  /// Applies a requested change and returns the change actually achieved.
  virtual double write_delta(double requested_dw) = 0;
  virtual std::unique_ptr<Synapse> clone() const = 0;
};

/// Exact weight. With `clip` the value stays in [-1, 1].
class IdealSynapse final : public Synapse {
 public:
  explicit IdealSynapse(double weight = 0.0, bool clip = true);

  double read_weight() const override { return weight_; }
  double write_delta(double requested_dw) override;
  std::unique_ptr<Synapse> clone() const override { return std::make_unique<IdealSynapse>(*this); }

  void set_weight(double w);
  bool clipped() const { return clip_; }

 private:
  double weight_;
  bool clip_;
};

/// Pulse response of one device: Hall resistance after k pulses, k = 0, 1, ...
/// The forward sweep starts left-saturated (-195 mΩ) and pushes the wall right; the
/// backward sweep starts right-saturated (+195 mΩ) and pushes it left.
struct DeviceResponseTrace {
  int device_id = 0;
  double delta_theta_deg = 0.0;
  std::uint64_t seed = 0;
  double slope_mohm_per_pulse = 0.0;
  std::vector<double> forward;
  std::vector<double> backward;
  bool complete = true;  // false when a sweep stalled before saturating

  friend bool operator==(const DeviceResponseTrace&, const DeviceResponseTrace&) = default;
};

/// Something a current pulse can be applied to.
class PulseBackend {
 public:
  virtual ~PulseBackend() = default;
  /// Current Hall resistance in mΩ, already clipped to ±195.
  virtual double resistance() const = 0;
  /// One pulse; direction +1 moves the wall right (R_H up), -1 left.
  virtual void pulse(int direction) = 0;
  /// Back to the left- or right-saturated start.
  virtual void reset(bool right_end) = 0;
  virtual std::unique_ptr<PulseBackend> clone() const = 0;
};

/// Replays a recorded trace. Consecutive pulses in one direction walk that
/// direction's staircase; on a direction change the walk re-enters the other
/// staircase at the step whose resistance is nearest the present one (lowest
/// index on ties).
class SurrogateBackend final : public PulseBackend {
 public:
  explicit SurrogateBackend(std::shared_ptr<const DeviceResponseTrace> trace);

  double resistance() const override { return resistance_; }
  void pulse(int direction) override;
  void reset(bool right_end) override;
  std::unique_ptr<PulseBackend> clone() const override {
    return std::make_unique<SurrogateBackend>(*this);
  }

  const DeviceResponseTrace& trace() const { return *trace_; }

 private:
  const std::vector<double>& staircase(int direction) const;

  std::shared_ptr<const DeviceResponseTrace> trace_;
  int direction_ = 1;
  std::size_t index_ = 0;
  double resistance_ = 0.0;
};

/// The wire, its disorder and how it is integrated.
struct WireModel {
  micromag::MaterialParams params;
  std::shared_ptr<const micromag::GrainMap> grains;
  micromag::SolverOptions solver;
  double relax_tolerance = 1e-4;
};

/// Wall position (nm) of the saturated starts: far enough in that the reading
/// clips at ∓195 mΩ while the wall stays clear of the edge.
double saturated_start_nm(const micromag::WireGeometry& geometry, bool right_end);

/// Live LLG simulation of the wire.
class MicromagBackend final : public PulseBackend {
 public:
  MicromagBackend(WireModel wire, micromag::DriveSpec drive, bool start_right = false);
  MicromagBackend(const MicromagBackend& other);
  MicromagBackend& operator=(const MicromagBackend&) = delete;

  double resistance() const override;
  void pulse(int direction) override;
  void reset(bool right_end) override;
  std::unique_ptr<PulseBackend> clone() const override {
    return std::make_unique<MicromagBackend>(*this);
  }

  const micromag::SpinField& field() const { return field_; }
  const WireModel& wire() const { return wire_; }

 private:
  WireModel wire_;
  micromag::DriveSpec drive_;
  std::unique_ptr<micromag::LlgSolver> solver_;
  micromag::SpinField field_;
};

/// A domain-wall device used as a weight: w = R_H / 195 mΩ.
class DomainWallSynapse final : public Synapse {
 public:
  DomainWallSynapse(std::unique_ptr<PulseBackend> backend, double slope_mohm_per_pulse,
                    micromag::DriveSpec drive = {}, int device_id = 0);
  DomainWallSynapse(const DomainWallSynapse& other);
  DomainWallSynapse& operator=(const DomainWallSynapse&) = delete;

  double read_weight() const override;
  /// N = round(|dw| 195 / slope) pulses in the direction of dw (none when that is
  /// below half a pulse). Stops early at the ±195 mΩ boundary. With carry on, the
  /// part of the request the pulses nominally leave unwritten is added to the next
  /// request (dropped when the boundary cuts a write short).
  double write_delta(double requested_dw) override;
  std::unique_ptr<Synapse> clone() const override {
    return std::make_unique<DomainWallSynapse>(*this);
  }

  /// Pulse count write_delta would use for a request.
  long pulses_for(double requested_dw) const;
  /// Applies up to `count` pulses, stopping at the boundary. Returns pulses applied.
  long apply_pulses(int direction, long count);
  void reset(bool right_end) { backend_->reset(right_end); }

  double slope() const { return slope_; }
  int device_id() const { return device_id_; }
  const micromag::DriveSpec& drive() const { return drive_; }
  const PulseBackend& backend() const { return *backend_; }
  long pulses_applied() const { return pulses_applied_; }

  void set_carry(bool on) {
    carry_ = on;
    pending_ = 0.0;
  }
  bool carry() const { return carry_; }
  double pending() const { return pending_; }

 private:
  std::unique_ptr<PulseBackend> backend_;
  double slope_;
  micromag::DriveSpec drive_;
  int device_id_;
  long pulses_applied_ = 0;
  bool carry_ = false;
  double pending_ = 0.0;
};

/// Surrogate synapse replaying `trace`, starting left-saturated, with the trace's slope.
DomainWallSynapse make_surrogate(std::shared_ptr<const DeviceResponseTrace> trace,
                                 micromag::DriveSpec drive = {});
DomainWallSynapse make_surrogate(const DeviceResponseTrace& trace, micromag::DriveSpec drive = {});

/// Programs an initial weight. Ideal synapses are set exactly. Domain-wall synapses
/// are reset to a saturated end picked at random, then written toward the target
/// with a few write-and-read passes while the error keeps shrinking.
/// Returns the weight actually reached.
double randomize_weight(Synapse& synapse, double target_w, std::mt19937_64& rng);

}  // namespace dwsyn::device
