#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dwsyn/datasets/dataset.hpp"
#include "dwsyn/device/synapse.hpp"
#include "dwsyn/pca/crossbar.hpp"

namespace dwsyn::experiments {

using Point = std::array<double, 2>;

/// Decision line w·p + b = 0 in the original coordinates; w·p + b > 0 predicts label 1.
struct Boundary {
  std::array<double, 2> w{0.0, 0.0};
  double b = 0.0;
  long iterations = 0;
  double gradient_norm = 0.0;
};

struct LogisticOptions {
  double rate = 0.1;
  double tolerance = 1e-6;
  long max_iterations = 100000;
  /// Newton steps taken from the zero vector before the gradient ascent; they only
  /// move the start point, the ascent's stopping rule still decides convergence.
  int newton_steps = 25;
};

/// Mean log-likelihood of labels under σ(w·p + b), and its gradient in (w1, w2, b).
double mean_log_likelihood(const std::array<double, 3>& theta, const std::vector<Point>& points,
                           const std::vector<int>& labels);
std::array<double, 3> mean_log_likelihood_gradient(const std::array<double, 3>& theta,
                                                   const std::vector<Point>& points,
                                                   const std::vector<int>& labels);

/// Full-batch gradient ascent on standardized coordinates; the result is mapped
/// back to the original coordinates. Throws InsufficientData for a single class.
/// `iterations` counts ascent steps only.
Boundary logistic_fit(const std::vector<Point>& points, const std::vector<int>& labels,
                      const LogisticOptions& options = {});

/// Fraction on their label's side; points exactly on the line count as wrong.
double score(const Boundary& boundary, const std::vector<Point>& points, const std::vector<int>& labels);

enum class Variant { kIdeal, kDisordered, kPopulation };
enum class DeviceBackend { kSurrogate, kMicromagnetic };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct ExperimentConfig {
  Variant variant = Variant::kIdeal;
  int n_population = 8;
  double encoder_spacing = 1.0;
  double encoder_variance = 0.18;
  double delta_theta_deg = 8.0;
  DeviceBackend backend = DeviceBackend::kSurrogate;
  std::vector<std::uint64_t> seeds{1};
  long steps = 15000;  // 100 epochs of 150 samples
  double learning_rate = 0.005;
  double init_range = 0.5;     // initial weights uniform in [-init_range, init_range]
  long checkpoint_every = 25;  // 0 disables the accuracy-vs-step trace
  bool fit_on_train = false;   // fit the boundary on train PCs and score on test PCs
  bool center_inputs = true;   // subtract the train-split mean from every crossbar input
  /// Device writes carry their sub-pulse remainder into the next request. Off, a
  /// Sanger update below half a pulse is simply lost, and at lr 0.005 that is all of them.
  bool carry_subpulse = true;
  int workers = 1;

  /// Throws InvalidParameter on an inconsistent config.
  void validate() const;
};

/// Builds a synapse for library entry `index` (live backends use this).
using DeviceFactory = std::function<std::unique_ptr<device::Synapse>(std::size_t index)>;

/// Inputs shared by every seed. `data` is the raw (unnormalized) dataset.
struct ExperimentContext {
  const datasets::Dataset* data = nullptr;
  /// Device population for the device-backed variants; incomplete traces are skipped.
  std::vector<std::shared_ptr<const device::DeviceResponseTrace>> library;
  /// Optional replacement for surrogate construction.
  DeviceFactory factory;
};

/// Loads a library file into the shared form used by ExperimentContext.
std::vector<std::shared_ptr<const device::DeviceResponseTrace>> share_library(
    const std::vector<device::DeviceResponseTrace>& traces);

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double accuracy = 0.0;
  pca::Diagnostics final;
  Boundary boundary;
  std::vector<Point> test_pcs;
  std::vector<int> test_labels;
  std::vector<long> checkpoint_steps;
  std::vector<double> checkpoint_accuracy;
  pca::TrainingTrace trace;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<SeedResult> per_seed;  // in config.seeds order
  std::size_t completed = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<long> steps;
  std::vector<double> mean_trace;
  std::vector<double> std_trace;
  std::vector<std::pair<std::string, std::string>> provenance;
};

/// Inputs as the crossbar sees them, for one split (train or test indices). Sanger's
/// rule finds eigenvectors of E[x xᵀ], so inputs are centred on the train mean unless
/// the config says otherwise.
std::vector<std::vector<double>> network_inputs(const ExperimentConfig& config, const datasets::Dataset& normalized,
                                                const std::vector<std::size_t>& rows);

/// Normalization the variant calls for: [-1, 1], or [-(n-1)·spacing, 0] per feature
/// for population coding.
datasets::Dataset prepare_dataset(const ExperimentConfig& config, const datasets::Dataset& raw);

/// Crossbar with random initial weights for one seed.
pca::Crossbar build_crossbar(const ExperimentConfig& config, const ExperimentContext& context, int rows,
                             std::uint64_t seed);

/// Trains one crossbar and scores its test-sample PCs.
SeedResult run_single(const ExperimentConfig& config, const ExperimentContext& context, std::uint64_t seed);

/// run_single for every configured seed (in parallel), plus mean and standard
/// deviation of accuracy, overall and per checkpoint step.
RunResult monte_carlo(const ExperimentConfig& config, const ExperimentContext& context);

/// monte_carlo for each population size, on the same seeds.
std::vector<RunResult> sweep_population(const ExperimentConfig& config, const ExperimentContext& context,
                                        const std::vector<int>& n_values);

/// Accuracy of projecting the test samples onto the top two covariance eigenvectors
/// of the training inputs and applying the same scorer.
double oracle_accuracy(const ExperimentConfig& config, const datasets::Dataset& raw);

/// 64-bit FNV-1a, used to tag outputs with the config that produced them.
std::uint64_t fnv1a(const std::string& text);
std::string describe(const ExperimentConfig& config);

void write_per_seed(std::ostream& out, const RunResult& result);
void write_aggregate(std::ostream& out, const RunResult& result);
void write_pc_scatter(std::ostream& out, const SeedResult& result, const std::string& provenance_line);
std::string provenance_line(const ExperimentConfig& config);

}  // namespace dwsyn::experiments
