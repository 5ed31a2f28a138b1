#include "doctest.h"

#include <cmath>

#include "dwsyn/encoding/population.hpp"
#include "dwsyn/errors.hpp"

using namespace dwsyn;
using encoding::encode;
using encoding::make_encoder;

TEST_CASE("means sit on a unit grid ending at zero") {
  const auto e3 = make_encoder(3);
  CHECK(e3.means == std::vector<double>{0.0, -1.0, -2.0});
  CHECK(e3.field_lo == -2.0);
  CHECK(e3.field_hi == 0.0);
  CHECK(make_encoder(2).means == std::vector<double>{0.0, -1.0});
  const auto wide = make_encoder(4, 0.5, 0.3);
  CHECK(wide.means.back() == doctest::Approx(-1.5));
  CHECK(wide.variance == 0.3);
}

TEST_CASE("invalid encoders are rejected") {
  CHECK_THROWS_AS(make_encoder(1), InvalidParameter);
  CHECK_THROWS_AS(make_encoder(3, 0.0), InvalidParameter);
  CHECK_THROWS_AS(make_encoder(3, 1.0, 0.0), InvalidParameter);
}

TEST_CASE("x = -1.3 with three neurons") {
  const auto x = encode(make_encoder(3), -1.3);
  // exp(-(x - mu)^2 / 0.36) written out for each mean
  CHECK(x[0] == doctest::Approx(std::exp(-1.69 / 0.36)).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(std::exp(-0.09 / 0.36)).epsilon(1e-14));
  CHECK(x[2] == doctest::Approx(std::exp(-0.49 / 0.36)).epsilon(1e-14));
  CHECK(x[0] >= 0.005);
  CHECK(x[0] <= 0.02);
  CHECK(std::abs(x[1] - 0.73) <= 0.06);
  CHECK(std::abs(x[2] - 0.25) <= 0.06);
}

TEST_CASE("tuning-curve properties") {
  const auto e = make_encoder(6);
  for (int k = 0; k < e.n; ++k) CHECK(encode(e, e.means[k])[k] == 1.0);

  for (double x = -6.0; x <= 1.0; x += 0.137) {
    const auto r = encode(e, x);
    int best = 0;
    for (int k = 0; k < e.n; ++k) {
      CHECK(r[k] > 0.0);
      CHECK(r[k] <= 1.0);
      if (r[k] > r[best]) best = k;
    }
    int nearest = 0;
    for (int k = 0; k < e.n; ++k) {
      if (std::abs(x - e.means[k]) < std::abs(x - e.means[nearest])) nearest = k;
    }
    CHECK(best == nearest);
  }

  for (double d : {0.1, 0.4, 1.3}) {
    CHECK(encode(e, e.means[2] + d)[2] == doctest::Approx(encode(e, e.means[2] - d)[2]).epsilon(1e-15));
  }

  double last = 2.0;
  for (double d = 0.0; d < 3.0; d += 0.25) {
    const double v = encode(e, e.means[3] + d)[3];
    CHECK(v < last);
    last = v;
  }

  for (double delta : {-0.49, -0.2, 0.2, 0.49}) {
    const auto r = encode(e, e.means[1] + delta);
    CHECK(std::max_element(r.begin(), r.end()) - r.begin() == 1);
  }
}

TEST_CASE("shifting the stimulus and the means together leaves responses unchanged") {
  auto e = make_encoder(5);
  const auto base = encode(e, -1.7);
  for (double& m : e.means) m += 2.5;
  const auto shifted = encode(e, -1.7 + 2.5);
  for (int k = 0; k < 5; ++k) CHECK(shifted[k] == doctest::Approx(base[k]).epsilon(1e-12));
}

TEST_CASE("samples are encoded feature by feature") {
  const std::vector encoders(4, make_encoder(8));
  const auto out = encoding::encode_sample(encoders, {0.0, -3.3, -7.0, -0.5});
  REQUIRE(out.size() == 32);
  const auto second = encode(encoders[1], -3.3);
  for (int k = 0; k < 8; ++k) CHECK(out[8 + k] == second[k]);

  const auto peaks = encoding::encode_sample(encoders, {0.0, 0.0, 0.0, 0.0});
  CHECK(std::count(peaks.begin(), peaks.end(), 1.0) == 4);

  CHECK_THROWS_AS(encoding::encode_sample(encoders, {0.0, 1.0}), ShapeError);
}
