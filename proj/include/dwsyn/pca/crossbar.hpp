#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "dwsyn/device/synapse.hpp"

namespace dwsyn::pca {

/// Input rows by two output columns of synapses.
class Crossbar {
 public:
  Crossbar(std::vector<std::unique_ptr<device::Synapse>> column1,
           std::vector<std::unique_ptr<device::Synapse>> column2, double learning_rate = 0.005);
  Crossbar(const Crossbar& other);
  Crossbar& operator=(const Crossbar& other);
  Crossbar(Crossbar&&) noexcept = default;
  Crossbar& operator=(Crossbar&&) noexcept = default;

  /// Unclipped ideal synapses holding the given columns.
  static Crossbar ideal(const std::vector<double>& w1, const std::vector<double>& w2,
                        double learning_rate = 0.005);

  int rows() const { return static_cast<int>(columns_[0].size()); }
  double learning_rate() const { return learning_rate_; }
  double weight(int row, int column) const;
  std::vector<double> column(int column) const;
  device::Synapse& synapse(int row, int column);
  const device::Synapse& synapse(int row, int column) const;

 private:
  std::array<std::vector<std::unique_ptr<device::Synapse>>, 2> columns_;
  double learning_rate_;
};

/// y_j = Σ_i x_i w_ij from read weights.
std::array<double, 2> forward(const Crossbar& crossbar, const std::vector<double>& x);

/// Sanger's rule Δw_ij = η y_j (x_i - Σ_{k≤j} w_ik y_k), evaluated on the weights as
/// they are before this update, then written through every synapse. Returns the
/// requested deltas, one {Δw_i1, Δw_i2} per row.
std::vector<std::array<double, 2>> sanger_update(Crossbar& crossbar, const std::vector<double>& x,
                                                 const std::array<double, 2>& y);

struct Diagnostics {
  double norm1 = 0.0;
  double norm2 = 0.0;
  double angle_deg = 0.0;
};

/// Column norms and the angle between the columns. Throws UndefinedAngle when
/// either column is zero.
Diagnostics weight_diagnostics(const Crossbar& crossbar);
double angle_deg(const std::vector<double>& a, const std::vector<double>& b);

struct TrainingTrace {
  std::vector<long> step;  // 1-based update count
  std::vector<double> norm1;
  std::vector<double> norm2;
  std::vector<double> angle_deg;  // NaN while a column is exactly zero

  std::size_t size() const { return step.size(); }
};

/// Called after every update with the 1-based step count.
using StepObserver = std::function<void(long step, const Crossbar&)>;

/// `steps` forward + Sanger updates, cycling through the inputs in an order that
/// is reshuffled from `seed` at the start of every epoch.
TrainingTrace train(Crossbar& crossbar, const std::vector<std::vector<double>>& inputs, long steps,
                    std::uint64_t seed, const StepObserver& observer = {});

void write_trace(std::ostream& out, const TrainingTrace& trace);

}  // namespace dwsyn::pca
