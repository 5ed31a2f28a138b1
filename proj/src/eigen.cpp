#include "dwsyn/pca/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dwsyn/errors.hpp"

namespace dwsyn::pca {

namespace {

double off_diagonal_norm(const SymmetricMatrix& m) {
  double s = 0.0;
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      if (i != j) s += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigen(SymmetricMatrix m, double tolerance, int max_sweeps) {
  const int n = m.n;
  if (n < 1 || m.a.size() != static_cast<std::size_t>(n) * n) throw ShapeError("matrix storage does not match n");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * (std::abs(m(i, j)) + std::abs(m(j, i)) + 1.0)) {
        throw InvalidParameter("matrix is not symmetric");
      }
    }
  }
  SymmetricMatrix v{n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (double x : m.a) scale += x * x;
  scale = std::sqrt(scale);

  EigenDecomposition out;
  while (off_diagonal_norm(m) > tolerance * scale && scale > 0.0) {
    if (out.sweeps++ >= max_sweeps) throw IntegrationError("Jacobi iteration did not converge");
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        // rotation angle that zeroes m(p, q)
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return m(a, a) > m(b, b); });
  for (int k : idx) {
    out.values.push_back(m(k, k));
    std::vector<double> vec(n);
    for (int i = 0; i < n; ++i) vec[i] = v(i, k);
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

SymmetricMatrix sample_covariance(const std::vector<std::vector<double>>& samples) {
  if (samples.size() < 2) throw InsufficientData("covariance needs at least two samples");
  const std::size_t d = samples.front().size();
  if (d < 1) throw ShapeError("samples have no features");
  std::vector<double> mean(d, 0.0);
  for (const auto& s : samples) {
    if (s.size() != d) throw ShapeError("samples differ in length");
    for (std::size_t i = 0; i < d; ++i) mean[i] += s[i];
  }
  for (double& m : mean) m /= static_cast<double>(samples.size());
  SymmetricMatrix c{static_cast<int>(d), std::vector<double>(d * d, 0.0)};
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) c.a[i * d + j] += (s[i] - mean[i]) * (s[j] - mean[j]);
    }
  }
  for (double& x : c.a) x /= static_cast<double>(samples.size() - 1);
  return c;
}

PcaResult pca_oracle(const std::vector<std::vector<double>>& samples) {
  const auto cov = sample_covariance(samples);
  if (cov.n < 2) throw ShapeError("PCA needs at least two dimensions");
  PcaResult r;
  r.full = jacobi_eigen(cov);
  r.lambda1 = r.full.values[0];
  r.lambda2 = r.full.values[1];
  r.v1 = r.full.vectors[0];
  r.v2 = r.full.vectors[1];
  r.degenerate = std::abs(r.lambda1 - r.lambda2) <= 1e-9 * std::max(1.0, std::abs(r.lambda1));
  return r;
}

}  // namespace dwsyn::pca
