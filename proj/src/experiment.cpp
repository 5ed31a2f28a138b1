#include "dwsyn/experiments/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "dwsyn/device/response.hpp"
#include "dwsyn/encoding/population.hpp"
#include "dwsyn/errors.hpp"
#include "dwsyn/parallel.hpp"
#include "dwsyn/pca/eigen.hpp"

namespace dwsyn::experiments {

namespace {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Damped Newton iterations on the concave log-likelihood. Stops early once the
// gradient is small or a step fails to improve (e.g. separable data).
void newton_start(std::array<double, 3>& theta, const std::vector<Point>& z, const std::vector<int>& labels,
                  int steps, double tolerance) {
  double ll = mean_log_likelihood(theta, z, labels);
  for (int it = 0; it < steps; ++it) {
    const auto g = mean_log_likelihood_gradient(theta, z, labels);
    if (std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]) < 0.1 * tolerance) return;
    // negative Hessian, A = Σ p(1-p) [z 1][z 1]ᵀ / N
    double a[3][4] = {};
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double p = sigmoid(theta[0] * z[i][0] + theta[1] * z[i][1] + theta[2]);
      const double v[3] = {z[i][0], z[i][1], 1.0};
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) a[r][c] += p * (1.0 - p) * v[r] * v[c];
      }
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) a[r][c] /= static_cast<double>(z.size());
      a[r][3] = g[r];
    }
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int r = c + 1; r < 3; ++r) {
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      }
      if (!(std::abs(a[piv][c]) > 1e-12)) return;
      std::swap(a[c], a[piv]);
      for (int r = 0; r < 3; ++r) {
        if (r == c) continue;
        const double f = a[r][c] / a[c][c];
        for (int k = c; k < 4; ++k) a[r][k] -= f * a[c][k];
      }
    }
    const std::array<double, 3> next{theta[0] + a[0][3] / a[0][0], theta[1] + a[1][3] / a[1][1],
                                      theta[2] + a[2][3] / a[2][2]};
    const double next_ll = mean_log_likelihood(next, z, labels);
    if (!(next_ll >= ll)) return;
    theta = next;
    ll = next_ll;
  }
}

void check_points(const std::vector<Point>& points, const std::vector<int>& labels) {
  if (points.size() != labels.size()) throw ShapeError("points and labels differ in length");
}

}  // namespace

double mean_log_likelihood(const std::array<double, 3>& theta, const std::vector<Point>& points,
                           const std::vector<int>& labels) {
  check_points(points, labels);
  if (points.empty()) throw InsufficientData("no points");
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = theta[0] * points[i][0] + theta[1] * points[i][1] + theta[2];
    s += labels[i] * t - softplus(t);
  }
  return s / static_cast<double>(points.size());
}

std::array<double, 3> mean_log_likelihood_gradient(const std::array<double, 3>& theta,
                                                   const std::vector<Point>& points,
                                                   const std::vector<int>& labels) {
  check_points(points, labels);
  if (points.empty()) throw InsufficientData("no points");
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = labels[i] - sigmoid(theta[0] * points[i][0] + theta[1] * points[i][1] + theta[2]);
    g[0] += r * points[i][0];
    g[1] += r * points[i][1];
    g[2] += r;
  }
  const double n = static_cast<double>(points.size());
  for (double& x : g) x /= n;
  return g;
}

Boundary logistic_fit(const std::vector<Point>& points, const std::vector<int>& labels,
                      const LogisticOptions& options) {
  check_points(points, labels);
  if (points.size() < 2) throw InsufficientData("logistic regression needs at least two points");
  const auto ones = std::count(labels.begin(), labels.end(), 1);
  if (ones == 0 || ones == static_cast<long>(labels.size())) {
    throw InsufficientData("logistic regression needs both labels");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw InvalidParameter("labels must be 0 or 1");
  }
  const double n = static_cast<double>(points.size());
  double mu[2] = {0, 0}, sd[2] = {0, 0};
  for (const auto& p : points) {
    mu[0] += p[0];
    mu[1] += p[1];
  }
  mu[0] /= n;
  mu[1] /= n;
  for (const auto& p : points) {
    sd[0] += (p[0] - mu[0]) * (p[0] - mu[0]);
    sd[1] += (p[1] - mu[1]) * (p[1] - mu[1]);
  }
  for (double& s : sd) {
    s = std::sqrt(s / n);
    if (!(s > 0.0)) s = 1.0;
  }
  std::vector<Point> z;
  z.reserve(points.size());
  for (const auto& p : points) z.push_back({(p[0] - mu[0]) / sd[0], (p[1] - mu[1]) / sd[1]});

  std::array<double, 3> theta{0.0, 0.0, 0.0};
  newton_start(theta, z, labels, options.newton_steps, options.tolerance);
  Boundary out;
  for (;;) {
    const auto g = mean_log_likelihood_gradient(theta, z, labels);
    out.gradient_norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if (out.gradient_norm < options.tolerance || out.iterations >= options.max_iterations) break;
    for (int k = 0; k < 3; ++k) theta[k] += options.rate * g[k];
    ++out.iterations;
  }
  out.w = {theta[0] / sd[0], theta[1] / sd[1]};
  out.b = theta[2] - theta[0] * mu[0] / sd[0] - theta[1] * mu[1] / sd[1];
  return out;
}

double score(const Boundary& boundary, const std::vector<Point>& points, const std::vector<int>& labels) {
  check_points(points, labels);
  if (points.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = boundary.w[0] * points[i][0] + boundary.w[1] * points[i][1] + boundary.b;
    if ((labels[i] == 1 && t > 0.0) || (labels[i] == 0 && t < 0.0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(points.size());
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kIdeal:
      return "ideal";
    case Variant::kDisordered:
      return "disordered";
    case Variant::kPopulation:
      return "population";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "ideal") return Variant::kIdeal;
  if (s == "disordered") return Variant::kDisordered;
  if (s == "population") return Variant::kPopulation;
  throw InvalidParameter("unknown variant '" + s + "' (ideal, disordered, population)");
}

void ExperimentConfig::validate() const {
  if (variant == Variant::kPopulation && n_population < 2) {
    throw InvalidParameter("population variant needs n_population >= 2");
  }
  if (seeds.empty()) throw InvalidParameter("at least one seed is required");
  if (steps < 0) throw InvalidParameter("steps must be non-negative");
  if (!(learning_rate > 0.0)) throw InvalidParameter("learning rate must be positive");
  if (!(init_range >= 0.0 && init_range <= 1.0)) throw InvalidParameter("init_range must lie in [0, 1]");
  if (checkpoint_every < 0) throw InvalidParameter("checkpoint_every must be non-negative");
  if (workers < 1) throw InvalidParameter("workers must be at least 1");
}

std::vector<std::shared_ptr<const device::DeviceResponseTrace>> share_library(
    const std::vector<device::DeviceResponseTrace>& traces) {
  std::vector<std::shared_ptr<const device::DeviceResponseTrace>> out;
  for (const auto& t : traces) out.push_back(std::make_shared<const device::DeviceResponseTrace>(t));
  return out;
}

datasets::Dataset prepare_dataset(const ExperimentConfig& config, const datasets::Dataset& raw) {
  if (config.variant == Variant::kPopulation) {
    return datasets::normalize(raw, -(config.n_population - 1) * config.encoder_spacing, 0.0);
  }
  return datasets::normalize(raw, -1.0, 1.0);
}

std::vector<std::vector<double>> network_inputs(const ExperimentConfig& config, const datasets::Dataset& normalized,
                                                const std::vector<std::size_t>& rows) {
  auto encode = [&](std::vector<std::vector<double>> x) {
    if (config.variant != Variant::kPopulation) return x;
    const std::vector<encoding::PopulationEncoder> encoders(
        normalized.dimension(),
        encoding::make_encoder(config.n_population, config.encoder_spacing, config.encoder_variance));
    for (auto& row : x) row = encoding::encode_sample(encoders, row);
    return x;
  };
  auto x = encode(normalized.rows(rows));
  if (!config.center_inputs || x.empty()) return x;
  const auto train = encode(normalized.rows(normalized.train));
  if (train.empty()) throw InsufficientData("no training rows to centre on");
  std::vector<double> mean(train.front().size(), 0.0);
  for (const auto& row : train) {
    for (std::size_t i = 0; i < row.size(); ++i) mean[i] += row[i];
  }
  for (double& m : mean) m /= static_cast<double>(train.size());
  for (auto& row : x) {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] -= mean[i];
  }
  return x;
}

pca::Crossbar build_crossbar(const ExperimentConfig& config, const ExperimentContext& context, int rows,
                             std::uint64_t seed) {
  // Separate streams so every variant draws the same initial targets for a seed.
  std::mt19937_64 weight_rng(seed);
  std::mt19937_64 device_rng(seed ^ 0xd1b54a32d192ed03ULL);
  std::mt19937_64 program_rng(seed ^ 0x8cb92ba72f3d8dd7ULL);
  std::uniform_real_distribution<double> init(-config.init_range, config.init_range);
  std::vector<double> targets(static_cast<std::size_t>(rows) * 2);
  for (double& t : targets) t = init(weight_rng);

  if (config.variant == Variant::kIdeal) {
    return pca::Crossbar::ideal(std::vector<double>(targets.begin(), targets.begin() + rows),
                                std::vector<double>(targets.begin() + rows, targets.end()), config.learning_rate);
  }
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < context.library.size(); ++i) {
    if (context.library[i] && context.library[i]->complete) usable.push_back(i);
  }
  if (usable.empty()) throw InvalidParameter("device-backed variants need at least one complete device trace");
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  std::array<std::vector<std::unique_ptr<device::Synapse>>, 2> cols;
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < rows; ++i) {
      const std::size_t lib = usable[pick(device_rng)];
      std::unique_ptr<device::Synapse> s =
          context.factory ? context.factory(lib)
                          : std::make_unique<device::DomainWallSynapse>(device::make_surrogate(context.library[lib]));
      if (auto* dw = dynamic_cast<device::DomainWallSynapse*>(s.get())) dw->set_carry(config.carry_subpulse);
      device::randomize_weight(*s, targets[static_cast<std::size_t>(j) * rows + i], program_rng);
      cols[j].push_back(std::move(s));
    }
  }
  return pca::Crossbar(std::move(cols[0]), std::move(cols[1]), config.learning_rate);
}

namespace {

std::vector<Point> project(const pca::Crossbar& crossbar, const std::vector<std::vector<double>>& x) {
  std::vector<Point> out;
  out.reserve(x.size());
  for (const auto& row : x) {
    const auto y = pca::forward(crossbar, row);
    out.push_back({y[0], y[1]});
  }
  return out;
}

double fit_and_score(const ExperimentConfig& config, const std::vector<Point>& train_pcs,
                     const std::vector<int>& train_labels, const std::vector<Point>& test_pcs,
                     const std::vector<int>& test_labels, Boundary& boundary) {
  const Boundary b = config.fit_on_train ? logistic_fit(train_pcs, train_labels) : logistic_fit(test_pcs, test_labels);
  boundary = b;
  return score(b, test_pcs, test_labels);
}

struct Prepared {
  std::vector<std::vector<double>> train_x;
  std::vector<std::vector<double>> test_x;
  std::vector<int> train_y;
  std::vector<int> test_y;
};

Prepared prepare(const ExperimentConfig& config, const ExperimentContext& context) {
  if (!context.data) throw InvalidParameter("experiment has no dataset");
  const auto data = prepare_dataset(config, *context.data);
  return {network_inputs(config, data, data.train), network_inputs(config, data, data.test),
          data.label_rows(data.train), data.label_rows(data.test)};
}

SeedResult run_prepared(const ExperimentConfig& config, const ExperimentContext& context, const Prepared& in,
                        std::uint64_t seed) {
  SeedResult r;
  r.seed = seed;
  auto crossbar = build_crossbar(config, context, static_cast<int>(in.train_x.front().size()), seed);

  pca::StepObserver observer;
  if (config.checkpoint_every > 0) {
    observer = [&](long step, const pca::Crossbar& cb) {
      if (step % config.checkpoint_every != 0) return;
      const auto test_pcs = project(cb, in.test_x);
      const auto train_pcs = config.fit_on_train ? project(cb, in.train_x) : std::vector<Point>{};
      double acc = 0.0;
      try {
        Boundary b;
        acc = fit_and_score(config, train_pcs, in.train_y, test_pcs, in.test_y, b);
      } catch (const InsufficientData&) {
      }
      r.checkpoint_steps.push_back(step);
      r.checkpoint_accuracy.push_back(acc);
    };
  }
  r.trace = pca::train(crossbar, in.train_x, config.steps, seed, observer);

  r.test_pcs = project(crossbar, in.test_x);
  r.test_labels = in.test_y;
  const auto train_pcs = config.fit_on_train ? project(crossbar, in.train_x) : std::vector<Point>{};
  r.accuracy = fit_and_score(config, train_pcs, in.train_y, r.test_pcs, in.test_y, r.boundary);
  const auto w1 = crossbar.column(0);
  const auto w2 = crossbar.column(1);
  r.final.norm1 = std::sqrt(std::inner_product(w1.begin(), w1.end(), w1.begin(), 0.0));
  r.final.norm2 = std::sqrt(std::inner_product(w2.begin(), w2.end(), w2.begin(), 0.0));
  try {
    r.final.angle_deg = pca::angle_deg(w1, w2);
  } catch (const UndefinedAngle&) {
    r.final.angle_deg = std::numeric_limits<double>::quiet_NaN();
  }
  r.ok = true;
  return r;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

}  // namespace

SeedResult run_single(const ExperimentConfig& config, const ExperimentContext& context, std::uint64_t seed) {
  config.validate();
  return run_prepared(config, context, prepare(config, context), seed);
}

RunResult monte_carlo(const ExperimentConfig& config, const ExperimentContext& context) {
  config.validate();
  const Prepared in = prepare(config, context);
  RunResult result;
  result.config = config;
  result.per_seed.resize(config.seeds.size());
  parallel_for(config.seeds.size(), config.workers, [&](std::size_t i) {
    try {
      result.per_seed[i] = run_prepared(config, context, in, config.seeds[i]);
    } catch (const Error& e) {
      result.per_seed[i].seed = config.seeds[i];
      result.per_seed[i].ok = false;
      result.per_seed[i].error = e.what();
    }
  });

  std::vector<double> finals;
  const SeedResult* first_ok = nullptr;
  for (const auto& r : result.per_seed) {
    if (!r.ok) continue;
    finals.push_back(r.accuracy);
    if (!first_ok) first_ok = &r;
  }
  result.completed = finals.size();
  std::tie(result.mean_accuracy, result.std_accuracy) = mean_std(finals);
  if (first_ok) {
    result.steps = first_ok->checkpoint_steps;
    for (std::size_t k = 0; k < result.steps.size(); ++k) {
      std::vector<double> col;
      for (const auto& r : result.per_seed) {
        if (r.ok) col.push_back(r.checkpoint_accuracy.at(k));
      }
      const auto [m, s] = mean_std(col);
      result.mean_trace.push_back(m);
      result.std_trace.push_back(s);
    }
  }
  if (context.data) result.provenance = context.data->provenance;
  return result;
}

std::vector<RunResult> sweep_population(const ExperimentConfig& config, const ExperimentContext& context,
                                        const std::vector<int>& n_values) {
  if (config.variant != Variant::kPopulation) throw InvalidParameter("population sweep needs the population variant");
  if (!std::is_sorted(n_values.begin(), n_values.end())) throw InvalidParameter("population sizes must be sorted");
  std::vector<RunResult> out;
  for (int n : n_values) {
    ExperimentConfig c = config;
    c.n_population = n;
    out.push_back(monte_carlo(c, context));
  }
  return out;
}

double oracle_accuracy(const ExperimentConfig& config, const datasets::Dataset& raw) {
  const auto data = prepare_dataset(config, raw);
  const auto train_x = network_inputs(config, data, data.train);
  const auto test_x = network_inputs(config, data, data.test);
  const auto pca_result = pca::pca_oracle(train_x);
  auto proj = [&](const std::vector<std::vector<double>>& x) {
    std::vector<Point> out;
    for (const auto& row : x) {
      out.push_back({std::inner_product(row.begin(), row.end(), pca_result.v1.begin(), 0.0),
                     std::inner_product(row.begin(), row.end(), pca_result.v2.begin(), 0.0)});
    }
    return out;
  };
  const auto train_pcs = config.fit_on_train ? proj(train_x) : std::vector<Point>{};
  Boundary b;
  return fit_and_score(config, train_pcs, data.label_rows(data.train), proj(test_x), data.label_rows(data.test), b);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream s;
  s << std::setprecision(17) << "variant=" << to_string(c.variant) << ";n=" << c.n_population
    << ";spacing=" << c.encoder_spacing << ";variance=" << c.encoder_variance << ";dtheta=" << c.delta_theta_deg
    << ";backend=" << (c.backend == DeviceBackend::kSurrogate ? "surrogate" : "micromagnetic")
    << ";steps=" << c.steps << ";lr=" << c.learning_rate << ";init=" << c.init_range
    << ";checkpoint=" << c.checkpoint_every << ";fit_on_train=" << c.fit_on_train
    << ";center=" << c.center_inputs << ";carry=" << c.carry_subpulse << ";seeds=";
  for (auto seed : c.seeds) s << seed << ' ';
  return s.str();
}

std::string provenance_line(const ExperimentConfig& config) {
  std::ostringstream s;
  s << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(describe(config)) << std::dec
    << " variant=" << to_string(config.variant);
  if (config.variant == Variant::kPopulation) s << " n=" << config.n_population;
  s << " seeds=";
  if (config.seeds.size() > 4) {
    s << config.seeds.front() << ".." << config.seeds.back() << "(" << config.seeds.size() << ")";
  } else {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) s << (i ? ";" : "") << config.seeds[i];
  }
  s << " version=dwsyn-1.0";
  return s.str();
}

void write_per_seed(std::ostream& out, const RunResult& result) {
  out << provenance_line(result.config) << '\n';
  for (const auto& [k, v] : result.provenance) out << "# " << k << '=' << v << '\n';
  out << "seed,final_accuracy,norm1,norm2,angle\n";
  out << std::setprecision(10);
  for (const auto& r : result.per_seed) {
    if (!r.ok) {
      out << "# seed " << r.seed << " failed: " << r.error << '\n';
      continue;
    }
    out << r.seed << ',' << r.accuracy << ',' << r.final.norm1 << ',' << r.final.norm2 << ',' << r.final.angle_deg
        << '\n';
  }
}

void write_aggregate(std::ostream& out, const RunResult& result) {
  out << provenance_line(result.config) << " completed=" << result.completed << '\n';
  out << "step,mean_acc,std_acc\n";
  out << std::setprecision(10);
  for (std::size_t k = 0; k < result.steps.size(); ++k) {
    out << result.steps[k] << ',' << result.mean_trace[k] << ',' << result.std_trace[k] << '\n';
  }
}

void write_pc_scatter(std::ostream& out, const SeedResult& result, const std::string& provenance) {
  out << provenance << '\n';
  out << "pc1,pc2,label\n";
  out << std::setprecision(10);
  for (std::size_t i = 0; i < result.test_pcs.size(); ++i) {
    out << result.test_pcs[i][0] << ',' << result.test_pcs[i][1] << ',' << result.test_labels[i] << '\n';
  }
}

}  // namespace dwsyn::experiments
