#include <doctest.h>

#include <cmath>
#include <random>

#include "dwsyn/errors.hpp"
#include "dwsyn/micromag/grains.hpp"
#include "dwsyn/micromag/llg.hpp"
#include "dwsyn/micromag/wall.hpp"

using namespace dwsyn;
using namespace dwsyn::micromag;

namespace {

WireGeometry strip(double length, double width) {
  WireGeometry g;
  g.length_nm = length;
  g.width_nm = width;
  return g;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return normalized(Vec3{n(rng), n(rng), n(rng)});
}

SpinField random_field(const WireGeometry& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SpinField f(g, {0, 0, 1});
  for (auto& m : f.m) m = random_unit(rng);
  return f;
}

}  // namespace

TEST_CASE("material scales") {
  MaterialParams p;
  const double u = p.polarization_P * 2e12 * constants::kBohrMagneton / (constants::kElementaryCharge * p.saturation_Ms);
  CHECK(p.stt_velocity(2e12) == doctest::Approx(u).epsilon(1e-12));
  CHECK(p.stt_velocity(-1e12) == doctest::Approx(-u / 2).epsilon(1e-12));
  CHECK(p.wall_width_nm() == doctest::Approx(std::sqrt(3e-11 / 8e5) * 1e9).epsilon(1e-12));

  auto bad = p;
  bad.gilbert_alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = p;
  bad.polarization_P = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);
  bad = p;
  bad.nonadiabatic_beta = -0.1;
  CHECK_THROWS_AS(bad.validate(), InvalidParameter);

  WireGeometry g;
  CHECK(g.nx() == 500);
  CHECK(g.ny() == 20);
  g.length_nm = 2002.0;
  CHECK_THROWS_AS(g.validate(), InvalidGeometry);
  CHECK_THROWS_AS(generate_voronoi_grains(strip(0.0, 80.0), 10.0, 8.0, 1), InvalidGeometry);
}

TEST_CASE("grain maps") {
  const WireGeometry g;
  const auto clean = generate_voronoi_grains(g, 10.0, 0.0, 3);
  for (const auto& a : clean.cell_axes) CHECK((a == Vec3{0, 0, 1}));

  const auto a = generate_voronoi_grains(g, 10.0, 8.0, 3);
  const auto b = generate_voronoi_grains(g, 10.0, 8.0, 3);
  CHECK(a.cell_axes == b.cell_axes);
  CHECK(a.grain_ids == b.grain_ids);
  CHECK(a.grain_count >= 1200);
  CHECK(a.grain_count <= 2000);

  std::vector<Vec3> axis_of(static_cast<std::size_t>(a.grain_count));
  std::vector<bool> seen(axis_of.size(), false);
  for (std::size_t c = 0; c < a.cell_axes.size(); ++c) {
    CHECK(std::abs(norm(a.cell_axes[c]) - 1.0) <= 1e-12);
    const auto id = static_cast<std::size_t>(a.grain_ids[c]);
    if (!seen[id]) axis_of[id] = a.cell_axes[c];
    seen[id] = true;
    CHECK((a.cell_axes[c] == axis_of[id]));
  }

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto m = generate_voronoi_grains(g, 10.0, 8.0, seed);
    // signed tilts are Normal(0, 8°); the stored polar angles are their magnitudes
    double sum_sq = 0.0;
    for (double t : m.grain_tilt_deg) sum_sq += t * t;
    const double rms = std::sqrt(sum_sq / static_cast<double>(m.grain_tilt_deg.size()));
    CHECK(rms >= 6.5);
    CHECK(rms <= 9.5);
    CHECK(m.grain_count >= 1200);
    CHECK(m.grain_count <= 2000);
  }
}

TEST_CASE("effective field") {
  const auto g = strip(40.0, 12.0);
  MaterialParams p;
  const auto clean = uniform_grains(g);
  FieldTerms only_k{false, true, false, false};

  SpinField up(g, {0, 0, 1});
  const auto h_ex = effective_field(up, p, clean, {true, false, false, false});
  for (const auto& h : h_ex) CHECK(norm(h) == doctest::Approx(0.0));
  const auto h_k = effective_field(up, p, clean, only_k);
  for (const auto& h : h_k) CHECK(h.z == doctest::Approx(2 * p.anisotropy_K / (constants::kMu0 * p.saturation_Ms)));

  SpinField side(g, {1, 0, 0});
  for (const auto& h : effective_field(side, p, clean, only_k)) CHECK(norm(h) == doctest::Approx(0.0));

  // directional derivative of the energy against the field, on a disordered random state
  const auto grains = generate_voronoi_grains(g, 10.0, 8.0, 4);
  p.external_field = {1e4, -2e4, 3e4};
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_field(g, 100 + static_cast<std::uint64_t>(trial));
    std::vector<Vec3> dm(f.m.size());
    for (auto& d : dm) d = random_unit(rng);
    const auto h = effective_field(f, p, grains);
    double predicted = 0.0;
    for (std::size_t c = 0; c < dm.size(); ++c) predicted -= dot(h[c], dm[c]);
    predicted *= constants::kMu0 * p.saturation_Ms * g.cell_volume_m3();
    const double eps = 1e-6;
    auto shifted = [&](double s) {
      auto copy = f;
      for (std::size_t c = 0; c < dm.size(); ++c) copy.m[c] += s * dm[c];
      return energy(copy, p, grains).total();
    };
    const double fd = (shifted(eps) - shifted(-eps)) / (2 * eps);
    CHECK(std::abs(fd - predicted) <= 1e-6 * std::abs(predicted));
  }
}

TEST_CASE("explicit form solves the implicit equation") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> mag(0.0, 3e5);
  std::uniform_real_distribution<double> adv(-5e9, 5e9);
  MaterialParams p;
  for (int i = 0; i < 200; ++i) {
    p.gilbert_alpha = std::uniform_real_distribution<double>(0.005, 0.9)(rng);
    p.nonadiabatic_beta = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
    const Vec3 m = random_unit(rng);
    const Vec3 h = mag(rng) * random_unit(rng);
    const Vec3 a = adv(rng) * random_unit(rng);
    const Vec3 md = llg_rhs(m, h, a, p);
    CHECK(llg_implicit_residual(m, md, h, a, p) < 1e-10);
  }
}

TEST_CASE("integration invariants") {
  const auto g = strip(80.0, 12.0);
  MaterialParams p;
  const auto grains = generate_voronoi_grains(g, 10.0, 8.0, 2);

  SUBCASE("fixed point") {
    const auto clean = uniform_grains(g);
    SpinField up(g, {0, 0, 1});
    for (const auto& r : LlgSolver(p, clean).rate(up, 0.0)) CHECK(norm(r) == 0.0);
    const auto next = llg_step(up, p, clean, 0.0, 2e-4);
    CHECK(next.m == up.m);
  }
  SUBCASE("norm and energy under damping") {
    auto f = random_field(g, 5);
    LlgSolver solver(p, grains);
    const double dt = solver.stable_dt(f);
    double e = energy(f, p, grains).total();
    for (int k = 0; k < 400; ++k) {
      solver.step(f, 0.0, dt);
      CHECK(f.max_norm_error() < 1e-9);
      CHECK(solver.last_max_drift() < 1e-4);
      const double next = energy(f, p, grains).total();
      CHECK(next <= e + 1e-8 * std::abs(e));
      e = next;
    }
  }
  SUBCASE("driven steps keep the norm") {
    auto f = random_field(g, 6);
    LlgSolver solver(p, grains);
    const double dt = solver.stable_dt(f);
    for (int k = 0; k < 200; ++k) {
      solver.step(f, 2e12, dt);
      CHECK(f.max_norm_error() < 1e-9);
    }
  }
  SUBCASE("bad steps") {
    auto f = random_field(g, 7);
    CHECK_THROWS_AS(llg_step(f, p, grains, 0.0, 0.0), IntegrationError);
    CHECK_THROWS_AS(llg_step(f, p, grains, 0.0, -1e-4), IntegrationError);
    f.m[3].x = std::nan("");
    CHECK_THROWS_AS(llg_step(f, p, grains, 0.0, 2e-4), IntegrationError);
  }
  SUBCASE("deterministic") {
    auto a = random_field(g, 8);
    auto b = a;
    LlgSolver sa(p, grains), sb(p, grains);
    sa.run(a, 1e12, 0.05);
    sb.run(b, 1e12, 0.05);
    CHECK(a.m == b.m);
  }
}

TEST_CASE("walls and readout") {
  const auto g = strip(400.0, 20.0);
  MaterialParams p;
  const auto clean = uniform_grains(g);
  LlgSolver solver(p, clean);

  const auto centred = init_domain_wall(solver, 200.0, true);
  CHECK(std::abs(hall_resistance(centred, p)) <= 2.0);
  CHECK(std::abs(wall_position(centred) - 200.0) <= g.cell_nm);
  CHECK(energy(centred, p, clean).total() < energy(domain_wall_ansatz(g, p, 200.0, true), p, clean).total());

  const auto quarter = init_domain_wall(solver, 100.0, false);
  CHECK(std::abs(wall_position(quarter) - 100.0) <= g.cell_nm);
  CHECK(hall_resistance(quarter, p) > 0.0);  // down on the left, up over the longer right side

  CHECK_THROWS_AS(wall_position(SpinField(g, {0, 0, 1})), SaturatedState);
  CHECK(hall_resistance(SpinField(g, {0, 0, 1}), p) == 195.0);
  CHECK(hall_resistance(SpinField(g, {0, 0, -1}), p) == -195.0);
  CHECK(hall_resistance_from_mz(0.0, p) == 0.0);
  CHECK(hall_resistance_from_mz(-0.5, p) == doctest::Approx(-107.5));
  CHECK(hall_resistance_from_mz(0.9, p) == doctest::Approx(193.5));

  // a windowed readout sees only its own columns
  CHECK(hall_resistance(centred, p, HallWindow{0.0, 100.0}) == 195.0);

  SUBCASE("zero drive holds the wall") {
    auto f = centred;
    const double x0 = wall_position(f);
    const double dt = solver.stable_dt(f);
    for (int k = 0; k < 10000; ++k) solver.step(f, 0.0, dt);
    CHECK(std::abs(wall_position(f) - x0) < g.cell_nm / 10.0);
  }
  SUBCASE("zero-current pulse") {
    auto f = centred;
    DriveSpec d;
    d.current_density = 0.0;
    apply_current_pulse(solver, f, d);
    CHECK(std::abs(wall_position(f) - 200.0) < g.cell_nm / 10.0);
  }
}

TEST_CASE("wall position picks the crossing nearest the magnetization balance") {
  const auto g = strip(400.0, 20.0);
  MaterialParams p;
  // profile with a short reversed island near the right end
  auto f = domain_wall_ansatz(g, p, 120.0, true);
  for (int ix = 90; ix < 93; ++ix) {
    for (int iy = 0; iy < f.ny(); ++iy) f.at(ix, iy) = {0, 0, 1};
  }
  const double x = wall_position(f);
  CHECK(std::abs(x - 120.0) <= g.cell_nm);

  // brute-force scan agrees on a monotone profile
  const auto mono = domain_wall_ansatz(g, p, 250.0, true);
  const auto prof = mono.column_mz_profile();
  double scan = -1.0;
  for (std::size_t i = 1; i < prof.size(); ++i) {
    if (prof[i - 1] > 0.0 && prof[i] <= 0.0) {
      const double x0 = g.cell_center_x_nm(static_cast<int>(i - 1));
      scan = x0 + g.cell_nm * prof[i - 1] / (prof[i - 1] - prof[i]);
    }
  }
  CHECK(wall_position(mono) == doctest::Approx(scan).epsilon(1e-12));
}

TEST_CASE("clean wire velocity") {
  // steady state of a driven wall below Walker breakdown is (β/α)u
  auto g = strip(1200.0, 20.0);
  MaterialParams p;
  SolverOptions o;
  o.active_margin_cells = 15;
  const auto clean = uniform_grains(g);
  LlgSolver solver(p, clean, o);
  const double j = 1e12;
  const double expected = p.nonadiabatic_beta / p.gilbert_alpha * p.stt_velocity(j);
  const double v = measure_velocity(solver, j, 2.0, 2.0);
  CHECK(v == doctest::Approx(expected).epsilon(0.05));
}
