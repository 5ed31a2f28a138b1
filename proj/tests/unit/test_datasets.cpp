#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

#include "dwsyn/datasets/dataset.hpp"
#include "dwsyn/errors.hpp"

using namespace dwsyn;
using datasets::Dataset;

namespace {

Dataset small(std::vector<std::vector<double>> x, std::vector<std::size_t> train) {
  Dataset d;
  d.features = std::move(x);
  d.labels.assign(d.features.size(), 0);
  for (std::size_t j = 0; j < d.features.front().size(); ++j) d.feature_names.push_back("f" + std::to_string(j));
  d.train = std::move(train);
  return d;
}

std::string mouse_table(std::uint64_t seed) {
  std::ostringstream s;
  datasets::write_synthetic_mouse_table(s, seed);
  return s.str();
}

Dataset load(const std::string& table, std::uint64_t seed, datasets::MouseProteinOptions opt = {}) {
  std::istringstream in(table);
  return datasets::load_mouse_protein(in, opt, seed);
}

std::string provenance(const Dataset& d, const std::string& key) {
  for (const auto& [k, v] : d.provenance) {
    if (k == key) return v;
  }
  return {};
}

}  // namespace

TEST_CASE("min-max normalization fitted on the train split") {
  auto d = small({{2.0, 1.0}, {8.0, 3.0}, {5.0, 2.0}, {11.0, 0.0}}, {0, 1, 2});
  d.test = {3};
  const auto n = datasets::normalize(d, -1.0, 1.0);
  CHECK(n.features[0][0] == -1.0);
  CHECK(n.features[1][0] == 1.0);
  CHECK(n.features[2][0] == 0.0);
  CHECK(n.features[0][1] == -1.0);
  CHECK(n.features[1][1] == 1.0);
  // the test sample is mapped with the train scaling and left unclipped
  CHECK(n.features[3][0] == doctest::Approx(2.0));
  CHECK(n.features[3][1] == doctest::Approx(-2.0));
  REQUIRE(n.scaling.size() == 2);
  CHECK(n.scaling[0].source_lo == 2.0);
  CHECK(n.scaling[0].source_hi == 8.0);
  CHECK(provenance(n, "test_values_outside_range") == "2");

  const auto twice = datasets::normalize(n, -1.0, 1.0);
  for (std::size_t i : n.train) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(twice.features[i][j] - n.features[i][j]) <= 1e-12);
  }
  CHECK_THROWS_AS(datasets::normalize(d, 1.0, 1.0), InvalidParameter);
}

TEST_CASE("constant train feature is named in the error") {
  auto d = small({{1.0, 4.0}, {2.0, 4.0}, {3.0, 5.0}}, {0, 1});
  try {
    datasets::normalize(d, -1.0, 1.0);
    FAIL("expected DegenerateFeature");
  } catch (const DegenerateFeature& e) {
    CHECK(e.feature() == "f1");
  }
}

TEST_CASE("stratified split") {
  Dataset d;
  for (int i = 0; i < 31; ++i) {
    d.features.push_back({static_cast<double>(i)});
    d.labels.push_back(i < 13 ? 1 : 0);
  }
  d.feature_names = {"x"};
  datasets::stratified_split(d, 5);
  CHECK(d.train.size() + d.test.size() == 31);
  std::set<std::size_t> seen(d.train.begin(), d.train.end());
  for (auto i : d.test) CHECK(seen.insert(i).second);
  auto ones = [&](const std::vector<std::size_t>& idx) {
    long c = 0;
    for (auto i : idx) c += d.labels[i];
    return c;
  };
  CHECK(std::abs(ones(d.train) - ones(d.test)) <= 1);
  CHECK(std::abs((static_cast<long>(d.train.size()) - ones(d.train)) - (static_cast<long>(d.test.size()) - ones(d.test))) <= 1);
}

TEST_CASE("mouse-protein loader on the stand-in table") {
  const auto table = mouse_table(1);
  const auto d = load(table, 1);
  CHECK(d.features.size() == 300);
  CHECK(d.train.size() == 150);
  CHECK(d.test.size() == 150);
  CHECK(d.dimension() == 4);
  CHECK(provenance(d, "warning").empty());
  for (const auto& row : d.features) {
    for (double v : row) CHECK(std::isfinite(v));
  }
  for (const auto* split : {&d.train, &d.test}) {
    const auto labels = d.label_rows(*split);
    CHECK(std::count(labels.begin(), labels.end(), 1) == 75);
  }

  const auto again = load(table, 1);
  CHECK(again.train == d.train);
  CHECK(again.test == d.test);
  CHECK(again.features == d.features);
  CHECK(load(table, 2).train != d.train);

  datasets::MouseProteinOptions opt;
  opt.proteins = {"DYRK1A_N", "ITSN1_N", "BDNF_N", "NR1_N"};
  const auto chosen = load(table, 1, opt);
  CHECK(chosen.feature_names == opt.proteins);
  CHECK(provenance(chosen, "protein_selection") == "configured");

  opt.proteins = {"DYRK1A_N"};
  CHECK_THROWS_AS(load(table, 1, opt), InvalidParameter);
  opt.proteins = {"DYRK1A_N", "ITSN1_N", "BDNF_N", "nope_N"};
  CHECK_THROWS_AS(load(table, 1, opt), DataError);
}

TEST_CASE("row-count mismatch is recorded and the run proceeds") {
  datasets::MouseProteinOptions opt;
  opt.genotype.clear();  // every memantine mouse, both genotypes
  const auto d = load(mouse_table(1), 1, opt);
  CHECK(d.features.size() == 570);
  CHECK_FALSE(provenance(d, "warning").empty());
}

TEST_CASE("malformed tables") {
  CHECK_THROWS_AS(load("", 1), DataError);
  CHECK_THROWS_AS(load("MouseID,DYRK1A_N,Genotype,Treatment\n", 1), DataError);
  CHECK_THROWS_AS(load("MouseID,DYRK1A_N,Genotype,Treatment,Behavior,class\n1,abc,Control,Memantine,C/S,c-CS-m\n", 1),
                  DataError);
}

TEST_CASE("imputation uses train means only") {
  std::string table = "MouseID,A_N,B_N,C_N,D_N,E_N,Genotype,Treatment,Behavior,class\n";
  const char* rows[] = {"1,1,2,3,4,5", "2,2,3,4,5,6", "3,3,4,5,6,7", "4,4,5,6,7,8",
                        "5,9,1,2,3,4", "6,8,2,3,4,5", "7,7,3,4,5,6", "8,,4,5,6,7"};
  for (int i = 0; i < 8; ++i) {
    table += std::string(rows[i]) + ",Control,Memantine," + (i < 4 ? "C/S,c-CS-m\n" : "S/C,c-SC-m\n");
  }
  datasets::MouseProteinOptions opt;
  opt.expected_rows = 8;
  opt.proteins = {"A_N", "B_N", "C_N", "D_N"};
  const auto d = load(table, 3, opt);
  double train_sum = 0.0;
  int train_n = 0;
  for (auto i : d.train) {
    if (i == 7) continue;
    train_sum += d.features[i][0];
    ++train_n;
  }
  CHECK(d.features[7][0] == doctest::Approx(train_sum / train_n));
  CHECK(provenance(d, "imputed_values") == "1");
}

TEST_CASE("synthetic gaussian clusters") {
  pca::SymmetricMatrix cov{3, {2.0, 0.5, 0.1, 0.5, 1.0, 0.2, 0.1, 0.2, 0.5}};
  const auto d = datasets::synthetic_gaussian_clusters(3, 5000, 0.0, cov, 11);
  const auto s = pca::sample_covariance(d.features);
  double err = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < 9; ++k) {
    err += (s.a[k] - cov.a[k]) * (s.a[k] - cov.a[k]);
    ref += cov.a[k] * cov.a[k];
  }
  CHECK(std::sqrt(err / ref) < 0.1);
  CHECK(d.train.size() == 5000);

  const auto sep = datasets::synthetic_gaussian_clusters(3, 100, 4.0, cov, 11, {0.0, 1.0, 0.0});
  CHECK(sep.population_covariance(1, 1) == doctest::Approx(1.0 + 4.0));
  const auto replay = datasets::synthetic_gaussian_clusters(3, 100, 4.0, cov, 11, {0.0, 1.0, 0.0});
  CHECK(replay.features == sep.features);
  CHECK(replay.train == sep.train);

  pca::SymmetricMatrix bad{2, {1.0, 2.0, 2.0, 1.0}};
  CHECK_THROWS_AS(datasets::synthetic_gaussian_clusters(2, 10, 1.0, bad, 1), InvalidParameter);
  CHECK_THROWS_AS(datasets::synthetic_gaussian_clusters(1, 10, 1.0, pca::SymmetricMatrix{1, {1.0}}, 1),
                  InvalidParameter);
}
