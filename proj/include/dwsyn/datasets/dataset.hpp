#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dwsyn/pca/eigen.hpp"

namespace dwsyn::datasets {

/// Per-feature affine map [source_lo, source_hi] -> [target_lo, target_hi].
struct FeatureScaling {
  double source_lo = 0.0;
  double source_hi = 1.0;
  double target_lo = 0.0;
  double target_hi = 1.0;

  double apply(double v) const {
    return target_lo + (v - source_lo) * (target_hi - target_lo) / (source_hi - source_lo);
  }
};

/// Labelled samples with a fixed train/test split. Label 1 means stimulated.
struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<FeatureScaling> scaling;  // empty until normalize()
  /// Free-form key/value record of where the data came from and what was done to it.
  std::vector<std::pair<std::string, std::string>> provenance;
  /// Synthetic data only: the population covariance the samples were drawn from.
  pca::SymmetricMatrix population_covariance;

  std::size_t dimension() const { return feature_names.size(); }
  std::vector<std::vector<double>> rows(const std::vector<std::size_t>& idx) const;
  std::vector<int> label_rows(const std::vector<std::size_t>& idx) const;
  void note(const std::string& key, const std::string& value) { provenance.emplace_back(key, value); }
};

struct MouseProteinOptions {
  /// Exactly four protein column names, or empty to pick the four with the largest
  /// standardized between-class mean difference on the train split.
  std::vector<std::string> proteins;
  std::string treatment = "Memantine";
  /// Empty keeps every genotype.
  std::string genotype = "Control";
  std::size_t expected_rows = 300;
  std::size_t selected_features = 4;
};

/// Reads the UCI mouse-protein table (MouseID, 77 protein columns, Genotype,
/// Treatment, Behavior, class). Label = 1 for context-shock ("C/S") behaviour.
/// Missing values are imputed with train-split means; the split is 50/50,
/// stratified by label.
Dataset load_mouse_protein(std::istream& table, const MouseProteinOptions& options, std::uint64_t seed);

/// Min-max scaling fitted on the train split and applied to every sample.
/// Throws DegenerateFeature for a feature that is constant on the train split.
Dataset normalize(const Dataset& dataset, double target_lo, double target_hi);

/// Two Gaussian classes with a shared covariance, centred at ±separation/2 along
/// `direction` (unit first axis if empty). Half of each class is used for training.
Dataset synthetic_gaussian_clusters(int dimension, std::size_t n_per_class, double mean_separation,
                                    const pca::SymmetricMatrix& covariance, std::uint64_t seed,
                                    std::vector<double> direction = {});

/// The 77 protein column names of the UCI table, in file order.
const std::vector<std::string>& mouse_protein_names();

/// Writes a synthetic stand-in table in the UCI layout: 8 classes of mice
/// (genotype × treatment × behaviour), 15 measurements per mouse, a few missing
/// values. A handful of proteins respond to the context-shock behaviour under
/// memantine; the rest are correlated background.
void write_synthetic_mouse_table(std::ostream& out, std::uint64_t seed);

/// Stratified 50/50 split. For odd class sizes the extra sample goes to training.
void stratified_split(Dataset& dataset, std::uint64_t seed);

}  // namespace dwsyn::datasets
