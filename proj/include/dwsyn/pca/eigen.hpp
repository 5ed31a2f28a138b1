#pragma once

#include <vector>

namespace dwsyn::pca {

/// Dense symmetric matrix, row-major.
struct SymmetricMatrix {
  int n = 0;
  std::vector<double> a;

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
};

struct EigenDecomposition {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // unit eigenvectors, same order
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// `tolerance` (relative to the full norm).
EigenDecomposition jacobi_eigen(SymmetricMatrix m, double tolerance = 1e-12, int max_sweeps = 100);

/// Mean-centred sample covariance (divides by N - 1).
SymmetricMatrix sample_covariance(const std::vector<std::vector<double>>& samples);

struct PcaResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  std::vector<double> v1;
  std::vector<double> v2;
  bool degenerate = false;  // λ1 and λ2 too close for v1 to be meaningful
  EigenDecomposition full;
};

/// Top two eigenpairs of the sample covariance.
PcaResult pca_oracle(const std::vector<std::vector<double>>& samples);

}  // namespace dwsyn::pca
