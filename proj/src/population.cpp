#include "dwsyn/encoding/population.hpp"

#include <cmath>

#include "dwsyn/errors.hpp"

namespace dwsyn::encoding {

PopulationEncoder make_encoder(int n, double spacing, double variance) {
  if (n < 2) throw InvalidParameter("a population needs at least two neurons");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw InvalidParameter("mean spacing must be positive");
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidParameter("variance must be positive");
  PopulationEncoder e;
  e.n = n;
  e.variance = variance;
  e.spacing = spacing;
  for (int k = 0; k < n; ++k) e.means.push_back(-k * spacing);
  e.field_lo = e.means.back();
  e.field_hi = e.means.front();
  return e;
}

std::vector<double> encode(const PopulationEncoder& encoder, double x) {
  if (!std::isfinite(x)) throw InvalidParameter("stimulus must be finite");
  std::vector<double> out;
  out.reserve(encoder.means.size());
  for (double mu : encoder.means) {
    const double d = x - mu;
    out.push_back(std::exp(-d * d / (2.0 * encoder.variance)));
  }
  return out;
}

std::vector<double> encode_sample(const std::vector<PopulationEncoder>& encoders,
                                  const std::vector<double>& features) {
  if (encoders.size() != features.size()) {
    throw ShapeError("one encoder per feature required");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto x = encode(encoders[i], features[i]);
    out.insert(out.end(), x.begin(), x.end());
  }
  return out;
}

}  // namespace dwsyn::encoding
