#pragma once

#include <vector>

namespace dwsyn::encoding {

/// Gaussian tuning curves with uniformly spaced preferred stimuli.
struct PopulationEncoder {
  int n = 0;
  double variance = 0.18;
  double spacing = 1.0;
  std::vector<double> means;  // 0, -spacing, ..., -(n-1) spacing
  double field_lo = 0.0;
  double field_hi = 0.0;
};

/// Means μ_k = -(k-1)·spacing, k = 1..n; the reception field is their span.
PopulationEncoder make_encoder(int n, double spacing = 1.0, double variance = 0.18);

/// X_k = exp(-(x - μ_k)² / (2 variance)).
std::vector<double> encode(const PopulationEncoder& encoder, double x);

/// Feature-major concatenation: out[i·n + k] = X_k(feature_i).
std::vector<double> encode_sample(const std::vector<PopulationEncoder>& encoders,
                                  const std::vector<double>& features);

}  // namespace dwsyn::encoding
