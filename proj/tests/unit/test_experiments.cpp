#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "dwsyn/device/response.hpp"
#include "dwsyn/errors.hpp"
#include "dwsyn/experiments/experiment.hpp"

using namespace dwsyn;
using namespace dwsyn::experiments;

namespace {

struct Labelled {
  std::vector<Point> points;
  std::vector<int> labels;
};

Labelled blobs(std::size_t n, double separation, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Labelled out;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double c = label ? separation / 2 : -separation / 2;
    out.points.push_back({c + g(rng), 0.5 * c + 3.0 * g(rng)});
    out.labels.push_back(label);
  }
  return out;
}

// Irregular staircase from -195 to +195 and back, the shape a pinned wall leaves.
device::DeviceResponseTrace jagged_trace(int id, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> step(0.0, 30.0);
  device::DeviceResponseTrace t;
  t.device_id = id;
  t.delta_theta_deg = 8.0;
  t.seed = seed;
  for (double r = -195.0; r < 195.0; r += step(rng)) t.forward.push_back(r);
  t.forward.push_back(195.0);
  for (double r = 195.0; r > -195.0; r -= step(rng)) t.backward.push_back(r);
  t.backward.push_back(-195.0);
  t.slope_mohm_per_pulse = device::calibrate(t);
  return t;
}

datasets::Dataset separable_dataset() {
  pca::SymmetricMatrix cov{4, {1.0, 0.2, 0.0, 0.0, 0.2, 0.6, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.2}};
  // 6 sigma between the class means along the dominant axis
  return datasets::synthetic_gaussian_clusters(4, 150, 6.0, cov, 21);
}

}  // namespace

TEST_CASE("log-likelihood gradient matches central differences") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = blobs(40, 1.0 + trial * 0.1, 100 + trial);
    const std::array<double, 3> theta{g(rng), g(rng), g(rng)};
    const auto grad = mean_log_likelihood_gradient(theta, data.points, data.labels);
    for (int k = 0; k < 3; ++k) {
      auto hi = theta, lo = theta;
      const double h = 1e-5;
      hi[k] += h;
      lo[k] -= h;
      const double fd = (mean_log_likelihood(hi, data.points, data.labels) -
                         mean_log_likelihood(lo, data.points, data.labels)) / (2 * h);
      CHECK(std::abs(fd - grad[k]) <= 1e-5 * std::max(1.0, std::abs(grad[k])));
    }
  }
}

TEST_CASE("logistic fit reaches a stationary point better than the origin") {
  const auto data = blobs(150, 1.5, 8);
  const auto b = logistic_fit(data.points, data.labels);
  CHECK(b.gradient_norm < 1e-6);
  const std::array<double, 3> theta{b.w[0], b.w[1], b.b};
  const auto grad = mean_log_likelihood_gradient(theta, data.points, data.labels);
  for (double v : grad) CHECK(std::abs(v) < 1e-5);
  CHECK(mean_log_likelihood(theta, data.points, data.labels) >=
        mean_log_likelihood({0.0, 0.0, 0.0}, data.points, data.labels));
  CHECK(score(b, data.points, data.labels) > 0.6);

  auto swapped = data.labels;
  for (int& l : swapped) l = 1 - l;
  const auto s = logistic_fit(data.points, swapped);
  CHECK(s.w[0] == doctest::Approx(-b.w[0]).epsilon(1e-5));
  CHECK(s.w[1] == doctest::Approx(-b.w[1]).epsilon(1e-5));
  CHECK(s.b == doctest::Approx(-b.b).epsilon(1e-5));
  CHECK(score(s, data.points, swapped) == score(b, data.points, data.labels));
}

TEST_CASE("separable data is classified perfectly") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto data = blobs(100, 14.0, seed);
    const auto b = logistic_fit(data.points, data.labels);
    CHECK(score(b, data.points, data.labels) == 1.0);
  }
  const std::vector<Point> line{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  CHECK(score(logistic_fit(line, {0, 0, 1, 1}), line, {0, 0, 1, 1}) == 1.0);
}

TEST_CASE("logistic fit preconditions") {
  CHECK_THROWS_AS(logistic_fit({{0, 0}, {1, 1}}, {1, 1}), InsufficientData);
  CHECK_THROWS_AS(logistic_fit({{0, 0}}, {1}), InsufficientData);
  CHECK_THROWS_AS(logistic_fit({{0, 0}, {1, 1}}, {1}), ShapeError);
}

TEST_CASE("scoring") {
  Boundary b;
  b.w = {1.0, 0.0};
  std::vector<Point> pts;
  std::vector<int> labels;
  for (int i = 0; i < 150; ++i) {
    pts.push_back({i < 75 ? -1.0 : 1.0, 0.0});
    labels.push_back(i < 75 ? 0 : 1);
  }
  CHECK(score(b, pts, labels) == 1.0);
  auto flipped = labels;
  for (int& l : flipped) l = 1 - l;
  CHECK(score(b, pts, flipped) == 0.0);
  for (int i = 0; i < 15; ++i) labels[i] = 1;
  CHECK(score(b, pts, labels) == doctest::Approx(0.9));
  CHECK(score(b, {{0.0, 5.0}}, {1}) == 0.0);
  CHECK(score(b, {{0.0, 5.0}}, {0}) == 0.0);
}

TEST_CASE("config validation and variant names") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.variant = Variant::kPopulation;
  c.n_population = 1;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c.n_population = 4;
  c.seeds.clear();
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  for (auto v : {Variant::kIdeal, Variant::kDisordered, Variant::kPopulation}) CHECK(parse_variant(to_string(v)) == v);
  CHECK_THROWS_AS(parse_variant("oracle"), InvalidParameter);
}

TEST_CASE("ideal run on well separated clusters") {
  const auto data = separable_dataset();
  ExperimentConfig c;
  c.seeds = {1, 2, 3, 4};
  ExperimentContext ctx{&data, {}, {}};
  const auto single = run_single(c, ctx, 2);
  CHECK(single.ok);
  CHECK(single.accuracy >= 0.95);
  REQUIRE(single.test_pcs.size() == data.test.size());

  // PC coordinates are plain dot products with the trained columns
  auto cb = build_crossbar(c, ctx, 4, 2);
  const auto normalized = prepare_dataset(c, data);
  pca::train(cb, network_inputs(c, normalized, normalized.train), c.steps, 2);
  const auto test_x = network_inputs(c, normalized, normalized.test);
  const auto w1 = cb.column(0);
  const auto w2 = cb.column(1);
  for (std::size_t i = 0; i < test_x.size(); ++i) {
    CHECK(single.test_pcs[i][0] == doctest::Approx(std::inner_product(w1.begin(), w1.end(), test_x[i].begin(), 0.0)));
    CHECK(single.test_pcs[i][1] == doctest::Approx(std::inner_product(w2.begin(), w2.end(), test_x[i].begin(), 0.0)));
  }

  // same seed alone or inside a parallel batch
  c.workers = 3;
  const auto batch = monte_carlo(c, ctx);
  CHECK(batch.completed == 4);
  CHECK(batch.per_seed[1].accuracy == single.accuracy);
  CHECK(batch.per_seed[1].test_pcs == single.test_pcs);
  CHECK(batch.per_seed[1].checkpoint_accuracy == single.checkpoint_accuracy);

  std::vector<double> acc;
  for (const auto& r : batch.per_seed) {
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
    acc.push_back(r.accuracy);
  }
  const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / 4.0;
  double var = 0.0;
  for (double a : acc) var += (a - mean) * (a - mean);
  CHECK(batch.mean_accuracy == doctest::Approx(mean).epsilon(1e-15));
  CHECK(batch.std_accuracy == doctest::Approx(std::sqrt(var / 3.0)).epsilon(1e-12));
  CHECK(batch.steps.size() == static_cast<std::size_t>(c.steps / c.checkpoint_every));
  CHECK(batch.steps.front() == 25);

  c.seeds = {2};
  const auto one = monte_carlo(c, ctx);
  CHECK(one.mean_accuracy == single.accuracy);
  CHECK(one.std_accuracy == 0.0);
  CHECK(one.mean_trace == single.checkpoint_accuracy);
}

TEST_CASE("device-backed variants") {
  const auto data = separable_dataset();
  std::vector<device::DeviceResponseTrace> traces;
  for (int i = 0; i < 6; ++i) traces.push_back(jagged_trace(i, 40 + i));
  traces[5].complete = false;
  ExperimentContext ctx{&data, share_library(traces), {}};

  ExperimentConfig c;
  c.seeds = {1, 2, 3, 4, 5, 6};
  const auto ideal = monte_carlo(c, ctx);
  c.variant = Variant::kDisordered;
  const auto disordered = monte_carlo(c, ctx);
  CHECK(disordered.completed == 6);
  CHECK(disordered.mean_accuracy <= ideal.mean_accuracy);

  // the stalled device is never placed in the crossbar
  auto cb = build_crossbar(c, ctx, 4, 9);
  for (int i = 0; i < cb.rows(); ++i) {
    for (int j = 0; j < 2; ++j) {
      const auto& s = dynamic_cast<const device::DomainWallSynapse&>(cb.synapse(i, j));
      CHECK(s.device_id() != 5);
      CHECK(std::abs(s.read_weight()) <= 1.0);
    }
  }

  c.variant = Variant::kPopulation;
  c.n_population = 3;
  CHECK(build_crossbar(c, ctx, 12, 1).rows() == 12);
  const auto sweep = sweep_population(c, ctx, {2, 3});
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[1].config.n_population == 3);
  CHECK_THROWS_AS(sweep_population(c, ctx, {3, 2}), InvalidParameter);

  ExperimentContext empty{&data, {}, {}};
  c.seeds = {1};
  const auto failed = monte_carlo(c, empty);
  CHECK(failed.completed == 0);
  CHECK_FALSE(failed.per_seed[0].ok);
  CHECK_FALSE(failed.per_seed[0].error.empty());
}

TEST_CASE("population inputs live in the encoder's reception field") {
  const auto data = separable_dataset();
  ExperimentConfig c;
  c.variant = Variant::kPopulation;
  c.n_population = 5;
  c.center_inputs = false;
  const auto n = prepare_dataset(c, data);
  for (auto i : n.train) {
    for (double v : n.features[i]) {
      CHECK(v >= -4.0);
      CHECK(v <= 0.0);
    }
  }
  const auto x = network_inputs(c, n, n.train);
  CHECK(x.front().size() == 20);
  for (const auto& row : x) {
    for (double v : row) {
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
    }
  }
  c.center_inputs = true;
  const auto centred = network_inputs(c, n, n.train);
  for (std::size_t k = 0; k < 20; ++k) {
    double s = 0.0;
    for (const auto& row : centred) s += row[k];
    CHECK(std::abs(s) < 1e-9);
  }
}

TEST_CASE("oracle projection and output tables") {
  const auto data = separable_dataset();
  ExperimentConfig c;
  c.seeds = {1, 2};
  CHECK(oracle_accuracy(c, data) >= 0.95);

  ExperimentContext ctx{&data, {}, {}};
  const auto r = monte_carlo(c, ctx);
  std::ostringstream per_seed, agg, scatter;
  write_per_seed(per_seed, r);
  write_aggregate(agg, r);
  write_pc_scatter(scatter, r.per_seed[0], provenance_line(c));
  CHECK(per_seed.str().rfind("# config_hash=", 0) == 0);
  CHECK(per_seed.str().find("\nseed,final_accuracy,norm1,norm2,angle\n") != std::string::npos);
  CHECK(agg.str().find("\nstep,mean_acc,std_acc\n") != std::string::npos);
  CHECK(scatter.str().find("\npc1,pc2,label\n") != std::string::npos);

  ExperimentConfig other = c;
  other.learning_rate = 0.01;
  CHECK(fnv1a(describe(c)) != fnv1a(describe(other)));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
