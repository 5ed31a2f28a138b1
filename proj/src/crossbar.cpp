#include "dwsyn/pca/crossbar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "dwsyn/errors.hpp"

namespace dwsyn::pca {

Crossbar::Crossbar(std::vector<std::unique_ptr<device::Synapse>> column1,
                   std::vector<std::unique_ptr<device::Synapse>> column2, double learning_rate)
    : columns_{std::move(column1), std::move(column2)}, learning_rate_(learning_rate) {
  if (columns_[0].size() != columns_[1].size()) throw ShapeError("crossbar columns differ in length");
  if (columns_[0].empty()) throw ShapeError("crossbar needs at least one row");
  for (const auto& col : columns_) {
    for (const auto& s : col) {
      if (!s) throw InvalidParameter("crossbar synapse missing");
    }
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidParameter("learning rate must be positive");
  }
}

Crossbar::Crossbar(const Crossbar& other) : learning_rate_(other.learning_rate_) {
  for (int j = 0; j < 2; ++j) {
    for (const auto& s : other.columns_[j]) columns_[j].push_back(s->clone());
  }
}

Crossbar& Crossbar::operator=(const Crossbar& other) {
  if (this != &other) *this = Crossbar(other);
  return *this;
}

Crossbar Crossbar::ideal(const std::vector<double>& w1, const std::vector<double>& w2, double learning_rate) {
  std::vector<std::unique_ptr<device::Synapse>> c1, c2;
  for (double w : w1) c1.push_back(std::make_unique<device::IdealSynapse>(w, false));
  for (double w : w2) c2.push_back(std::make_unique<device::IdealSynapse>(w, false));
  return Crossbar(std::move(c1), std::move(c2), learning_rate);
}

double Crossbar::weight(int row, int column) const { return synapse(row, column).read_weight(); }

std::vector<double> Crossbar::column(int column) const {
  std::vector<double> w;
  for (int i = 0; i < rows(); ++i) w.push_back(weight(i, column));
  return w;
}

device::Synapse& Crossbar::synapse(int row, int column) {
  return *columns_.at(static_cast<std::size_t>(column)).at(static_cast<std::size_t>(row));
}

const device::Synapse& Crossbar::synapse(int row, int column) const {
  return *columns_.at(static_cast<std::size_t>(column)).at(static_cast<std::size_t>(row));
}

std::array<double, 2> forward(const Crossbar& crossbar, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != crossbar.rows()) throw ShapeError("input length does not match crossbar rows");
  std::array<double, 2> y{0.0, 0.0};
  for (int i = 0; i < crossbar.rows(); ++i) {
    y[0] += x[i] * crossbar.weight(i, 0);
    y[1] += x[i] * crossbar.weight(i, 1);
  }
  return y;
}

std::vector<std::array<double, 2>> sanger_update(Crossbar& crossbar, const std::vector<double>& x,
                                                 const std::array<double, 2>& y) {
  if (static_cast<int>(x.size()) != crossbar.rows()) throw ShapeError("input length does not match crossbar rows");
  const double eta = crossbar.learning_rate();
  std::vector<std::array<double, 2>> delta(x.size());
  for (int i = 0; i < crossbar.rows(); ++i) {
    const double w1 = crossbar.weight(i, 0);
    const double w2 = crossbar.weight(i, 1);
    delta[i][0] = eta * y[0] * (x[i] - w1 * y[0]);
    delta[i][1] = eta * y[1] * (x[i] - w1 * y[0] - w2 * y[1]);
  }
  for (int i = 0; i < crossbar.rows(); ++i) {
    for (int j = 0; j < 2; ++j) {
      if (delta[i][j] != 0.0) crossbar.synapse(i, j).write_delta(delta[i][j]);
    }
  }
  return delta;
}

double angle_deg(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("vectors differ in length");
  const double na = std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
  const double nb = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (na == 0.0 || nb == 0.0) throw UndefinedAngle("angle with a zero vector is undefined");
  const double c = std::inner_product(a.begin(), a.end(), b.begin(), 0.0) / (na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / std::numbers::pi;
}

Diagnostics weight_diagnostics(const Crossbar& crossbar) {
  const auto w1 = crossbar.column(0);
  const auto w2 = crossbar.column(1);
  Diagnostics d;
  d.norm1 = std::sqrt(std::inner_product(w1.begin(), w1.end(), w1.begin(), 0.0));
  d.norm2 = std::sqrt(std::inner_product(w2.begin(), w2.end(), w2.begin(), 0.0));
  d.angle_deg = angle_deg(w1, w2);
  return d;
}

TrainingTrace train(Crossbar& crossbar, const std::vector<std::vector<double>>& inputs, long steps,
                    std::uint64_t seed, const StepObserver& observer) {
  TrainingTrace trace;
  if (steps <= 0) return trace;
  if (inputs.empty()) throw InsufficientData("training needs at least one input");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(inputs.size());
  std::size_t pos = order.size();
  for (long s = 1; s <= steps; ++s) {
    if (pos == order.size()) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      pos = 0;
    }
    const auto& x = inputs[order[pos++]];
    sanger_update(crossbar, x, forward(crossbar, x));

    const auto w1 = crossbar.column(0);
    const auto w2 = crossbar.column(1);
    trace.step.push_back(s);
    trace.norm1.push_back(std::sqrt(std::inner_product(w1.begin(), w1.end(), w1.begin(), 0.0)));
    trace.norm2.push_back(std::sqrt(std::inner_product(w2.begin(), w2.end(), w2.begin(), 0.0)));
    double angle = std::numeric_limits<double>::quiet_NaN();
    if (trace.norm1.back() > 0.0 && trace.norm2.back() > 0.0) angle = angle_deg(w1, w2);
    trace.angle_deg.push_back(angle);
    if (observer) observer(s, crossbar);
  }
  return trace;
}

void write_trace(std::ostream& out, const TrainingTrace& trace) {
  out << "step,norm1,norm2,angle_deg\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.step[i] << ',' << trace.norm1[i] << ',' << trace.norm2[i] << ',' << trace.angle_deg[i] << '\n';
  }
}

}  // namespace dwsyn::pca
