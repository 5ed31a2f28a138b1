#include <doctest.h>

#include <sstream>

#include "cli_config.hpp"
#include "dwsyn/errors.hpp"

using namespace dwsyn;
using namespace dwsyn::cli;

namespace {
Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}
}  // namespace

TEST_CASE("ini overrides only what it names") {
  const auto c = parse(
      "[material]\ngilbert_alpha = 0.1\n"
      "[velocity]\ncurrent_densities = 1e12, 2e12 ,3e12\n"
      "[experiment]\nvariant = population\nseeds = 5\ncenter_inputs = false\n"
      "[dataset]\nproteins = A_N, B_N,C_N , D_N\n");
  CHECK(c.material.gilbert_alpha == 0.1);
  CHECK(c.material.exchange_A == Config{}.material.exchange_A);
  CHECK(c.j_grid == std::vector<double>{1e12, 2e12, 3e12});
  CHECK(c.experiment.variant == experiments::Variant::kPopulation);
  CHECK(c.seed_count == 5);
  CHECK_FALSE(c.experiment.center_inputs);
  CHECK(c.mouse.proteins == std::vector<std::string>{"A_N", "B_N", "C_N", "D_N"});
}

TEST_CASE("bad ini input names the key") {
  CHECK_THROWS_WITH_AS(parse("[material]\nalpha = 0.1\n"), doctest::Contains("alpha"), InvalidParameter);
  CHECK_THROWS_WITH_AS(parse("[material]\ngilbert_alpha = fast\n"), doctest::Contains("gilbert_alpha"),
                       InvalidParameter);
  CHECK_THROWS_WITH_AS(parse("[nowhere]\nx = 1\n"), doctest::Contains("nowhere"), InvalidParameter);
  CHECK_THROWS_AS(parse("[experiment]\nvariant = quantum\n"), InvalidParameter);
  CHECK_THROWS_AS(parse("[experiment]\nfit_on_train = maybe\n"), InvalidParameter);
  CHECK_THROWS_AS(parse("[material]\ngilbert_alpha = 0.1 0.2\n"), InvalidParameter);
}

TEST_CASE("printed defaults parse back to the same config") {
  Config c;
  c.material.nonadiabatic_beta = 0.037;
  c.population_n = {2, 3};
  c.mouse.proteins = {"x", "y", "z", "w"};
  std::ostringstream first;
  write_default_config(first, c);
  std::istringstream in(first.str());
  std::ostringstream second;
  write_default_config(second, parse_config(in));
  CHECK(first.str() == second.str());
}

TEST_CASE("finalize expands seeds and checks files") {
  Config c;
  c.seed_base = 10;
  c.seed_count = 3;
  c.workers = 2;
  finalize(c);
  CHECK(c.experiment.seeds == std::vector<std::uint64_t>{10, 11, 12});
  CHECK(c.experiment.workers == 2);

  Config missing;
  missing.dataset_path = "/nonexistent/table.csv";
  CHECK_THROWS_AS(finalize(missing), InvalidParameter);

  Config none;
  none.seed_count = 0;
  CHECK_THROWS_AS(finalize(none), InvalidParameter);
}
