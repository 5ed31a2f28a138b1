#include "dwsyn/device/synapse.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dwsyn/errors.hpp"
#include "dwsyn/micromag/wall.hpp"

namespace dwsyn::device {

IdealSynapse::IdealSynapse(double weight, bool clip) : weight_(0.0), clip_(clip) {
  set_weight(weight);
}

void IdealSynapse::set_weight(double w) {
  if (!std::isfinite(w)) throw InvalidParameter("weight must be finite");
  weight_ = clip_ ? std::clamp(w, -1.0, 1.0) : w;
}

double IdealSynapse::write_delta(double requested_dw) {
  const double before = weight_;
  set_weight(weight_ + requested_dw);
  return weight_ - before;
}

SurrogateBackend::SurrogateBackend(std::shared_ptr<const DeviceResponseTrace> trace)
    : trace_(std::move(trace)) {
  if (!trace_ || trace_->forward.empty() || trace_->backward.empty()) {
    throw InvalidParameter("surrogate needs both staircases");
  }
  reset(false);
}

const std::vector<double>& SurrogateBackend::staircase(int direction) const {
  return direction > 0 ? trace_->forward : trace_->backward;
}

void SurrogateBackend::reset(bool right_end) {
  direction_ = right_end ? -1 : 1;
  index_ = 0;
  resistance_ = staircase(direction_).front();
}

void SurrogateBackend::pulse(int direction) {
  if (direction == 0) return;
  direction = direction > 0 ? 1 : -1;
  const auto& steps = staircase(direction);
  if (direction != direction_) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < steps.size(); ++i) {
      if (std::abs(steps[i] - resistance_) < std::abs(steps[best] - resistance_)) best = i;
    }
    direction_ = direction;
    index_ = best;
  }
  if (index_ + 1 < steps.size()) ++index_;
  resistance_ = steps[index_];
}

double saturated_start_nm(const micromag::WireGeometry& geometry, bool right_end) {
  const double inset = 0.04 * geometry.length_nm;
  return right_end ? geometry.length_nm - inset : inset;
}

MicromagBackend::MicromagBackend(WireModel wire, micromag::DriveSpec drive, bool start_right)
    : wire_(std::move(wire)), drive_(drive) {
  if (!wire_.grains) throw InvalidParameter("wire model has no grain map");
  drive_.validate();
  solver_ = std::make_unique<micromag::LlgSolver>(wire_.params, *wire_.grains, wire_.solver);
  reset(start_right);
}

MicromagBackend::MicromagBackend(const MicromagBackend& other)
    : wire_(other.wire_),
      drive_(other.drive_),
      solver_(std::make_unique<micromag::LlgSolver>(wire_.params, *wire_.grains, wire_.solver)),
      field_(other.field_) {}

double MicromagBackend::resistance() const {
  return micromag::hall_resistance(field_, wire_.params);
}

void MicromagBackend::pulse(int direction) {
  if (direction == 0) return;
  micromag::DriveSpec d = drive_;
  d.current_density = (direction > 0 ? 1.0 : -1.0) * std::abs(drive_.current_density);
  micromag::apply_current_pulse(*solver_, field_, d);
}

void MicromagBackend::reset(bool right_end) {
  field_ = micromag::init_domain_wall(*solver_, saturated_start_nm(wire_.grains->geometry, right_end),
                                      true, wire_.relax_tolerance);
}

DomainWallSynapse::DomainWallSynapse(std::unique_ptr<PulseBackend> backend, double slope_mohm_per_pulse,
                                     micromag::DriveSpec drive, int device_id)
    : backend_(std::move(backend)), slope_(slope_mohm_per_pulse), drive_(drive), device_id_(device_id) {
  if (!backend_) throw InvalidParameter("synapse needs a backend");
  if (!(slope_ > 0.0) || !std::isfinite(slope_)) {
    throw InvalidParameter("calibrated slope must be positive");
  }
}

DomainWallSynapse::DomainWallSynapse(const DomainWallSynapse& other)
    : backend_(other.backend_->clone()),
      slope_(other.slope_),
      drive_(other.drive_),
      device_id_(other.device_id_),
      pulses_applied_(other.pulses_applied_),
      carry_(other.carry_),
      pending_(other.pending_) {}

double DomainWallSynapse::read_weight() const {
  return std::clamp(backend_->resistance() / kFullScaleMilliOhm, -1.0, 1.0);
}

long DomainWallSynapse::pulses_for(double requested_dw) const {
  if (!std::isfinite(requested_dw)) throw InvalidParameter("requested weight change must be finite");
  const double n = std::abs(requested_dw) * kFullScaleMilliOhm / slope_;
  if (n < 0.5) return 0;
  return std::lround(n);
}

long DomainWallSynapse::apply_pulses(int direction, long count) {
  long applied = 0;
  for (; applied < count; ++applied) {
    const double r = backend_->resistance();
    if ((direction > 0 && r >= kFullScaleMilliOhm) || (direction < 0 && r <= -kFullScaleMilliOhm)) break;
    backend_->pulse(direction);
  }
  pulses_applied_ += applied;
  return applied;
}

double DomainWallSynapse::write_delta(double requested_dw) {
  const double total = requested_dw + pending_;
  const long n = pulses_for(total);
  const int direction = total > 0.0 ? 1 : -1;
  const double before = read_weight();
  const long applied = n > 0 ? apply_pulses(direction, n) : 0;
  if (carry_) {
    pending_ = applied == n ? total - direction * static_cast<double>(n) * slope_ / kFullScaleMilliOhm : 0.0;
  }
  return read_weight() - before;
}

DomainWallSynapse make_surrogate(std::shared_ptr<const DeviceResponseTrace> trace,
                                 micromag::DriveSpec drive) {
  const double slope = trace->slope_mohm_per_pulse;
  const int id = trace->device_id;
  return DomainWallSynapse(std::make_unique<SurrogateBackend>(std::move(trace)), slope, drive, id);
}

DomainWallSynapse make_surrogate(const DeviceResponseTrace& trace, micromag::DriveSpec drive) {
  return make_surrogate(std::make_shared<const DeviceResponseTrace>(trace), drive);
}

namespace {
constexpr int kProgramPasses = 8;
constexpr long kTrimPulses = 64;
}  // namespace

double randomize_weight(Synapse& synapse, double target_w, std::mt19937_64& rng) {
  if (!(target_w >= -1.0 && target_w <= 1.0)) throw InvalidParameter("target weight must lie in [-1, 1]");
  if (auto* ideal = dynamic_cast<IdealSynapse*>(&synapse)) {
    ideal->set_weight(target_w);
    return ideal->read_weight();
  }
  auto* dw = dynamic_cast<DomainWallSynapse*>(&synapse);
  const bool carry = dw && dw->carry();
  if (dw) {
    dw->set_carry(false);
    dw->reset(std::bernoulli_distribution(0.5)(rng));
  }
  // write and verify: coarse writes while the error keeps shrinking, then single pulses
  double error = target_w - synapse.read_weight();
  for (int pass = 0; pass < kProgramPasses; ++pass) {
    if (dw && dw->pulses_for(error) == 0) break;
    synapse.write_delta(error);
    const double next = target_w - synapse.read_weight();
    if (!(std::abs(next) < std::abs(error))) break;
    error = next;
  }
  if (!dw) return synapse.read_weight();
  dw->set_carry(carry);
  error = target_w - synapse.read_weight();
  for (long trim = 0; trim < kTrimPulses && error != 0.0; ++trim) {
    if (dw->apply_pulses(error > 0.0 ? 1 : -1, 1) == 0) break;
    const double next = target_w - synapse.read_weight();
    if (!(std::abs(next) < std::abs(error)) || (next > 0.0) != (error > 0.0)) break;
    error = next;
  }
  return synapse.read_weight();
}

}  // namespace dwsyn::device
