// dwsyn: command-line driver. Every table it writes starts with a provenance
// comment and a column header, and is plain comma-separated text.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>

#include "cli_config.hpp"
#include "dwsyn/errors.hpp"
#include "dwsyn/parallel.hpp"

namespace fs = std::filesystem;
using namespace dwsyn;

namespace {

constexpr const char* kVersion = "dwsyn-1.0";

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string seed_list(const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) return "none";
  if (seeds.size() > 4) {
    return std::to_string(seeds.front()) + ".." + std::to_string(seeds.back()) + "(" +
           std::to_string(seeds.size()) + ")";
  }
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? ";" : "") + std::to_string(seeds[i]);
  return s;
}

std::string provenance(const cli::Config& config, const std::string& command, const std::vector<std::uint64_t>& seeds) {
  std::ostringstream dump;
  cli::write_default_config(dump, config);
  std::ostringstream s;
  s << "# config_hash=" << std::hex << std::setw(16) << std::setfill('0') << experiments::fnv1a(dump.str())
    << std::dec << " command=" << command << " seeds=" << seed_list(seeds) << " version=" << kVersion;
  return s.str();
}

std::vector<std::uint64_t> device_seeds(const cli::Config& c, int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(c.seed_base + static_cast<std::uint64_t>(i));
  return seeds;
}

std::ofstream open_table(const cli::Config& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  const fs::path path = fs::path(c.out_dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(10);
  std::clog << "writing " << path.string() << '\n';
  return out;
}

std::shared_ptr<const micromag::GrainMap> grains_for(const cli::Config& c, double delta_theta, std::uint64_t seed) {
  if (delta_theta == 0.0) return std::make_shared<const micromag::GrainMap>(micromag::uniform_grains(c.geometry));
  return std::make_shared<const micromag::GrainMap>(
      micromag::generate_voronoi_grains(c.geometry, c.grain_diameter_nm, delta_theta, seed));
}

// ---------------------------------------------------------------- velocity

struct VelocityUnit {
  double delta_theta = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::optional<double>> velocity;
  std::string j_c_status;
  double j_c = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

int cmd_velocity(const cli::Config& c) {
  if (c.j_grid.empty()) throw UsageError("velocity needs a non-empty current_densities grid");
  if (c.delta_thetas.empty()) throw UsageError("velocity needs at least one delta_theta_deg");
  std::vector<VelocityUnit> units;
  for (double dt : c.delta_thetas) {
    const int n = dt == 0.0 ? 1 : c.velocity_devices;
    for (auto seed : device_seeds(c, n)) units.push_back({dt, seed, {}, {}, std::numeric_limits<double>::quiet_NaN(), {}});
  }
  std::mutex log;
  parallel_for(units.size(), c.workers, [&](std::size_t i) {
    auto& u = units[i];
    const auto grains = grains_for(c, u.delta_theta, u.seed);
    for (double j : c.j_grid) {
      try {
        micromag::LlgSolver solver(c.material, *grains, c.solver);
        u.velocity.push_back(micromag::measure_velocity(solver, j, c.settle_ns, c.measure_ns));
      } catch (const Error& e) {
        u.velocity.push_back(std::nullopt);
        u.error = e.what();
      }
    }
    try {
      micromag::LlgSolver solver(c.material, *grains, c.solver);
      u.j_c = micromag::find_critical_current(solver, c.jc_lo, c.jc_hi, c.jc_tolerance, c.jc);
      u.j_c_status = "bisected";
    } catch (const BracketError& e) {
      // Either the wall already moves at jc_lo or it is still pinned at jc_hi.
      micromag::LlgSolver solver(c.material, *grains, c.solver);
      const auto start = micromag::init_domain_wall(solver, c.geometry.length_nm * 0.25, true, c.jc.relax_tolerance);
      const bool moves_lo = micromag::wall_moves(solver, start, c.jc_lo, c.jc);
      u.j_c = moves_lo ? c.jc_lo : c.jc_hi;
      u.j_c_status = moves_lo ? "below_range" : "above_range";
    } catch (const Error& e) {
      u.j_c_status = "failed";
      u.error = e.what();
    }
    std::lock_guard lock(log);
    std::clog << "delta_theta=" << u.delta_theta << " seed=" << u.seed << " j_c=" << u.j_c << " (" << u.j_c_status
              << ")\n";
  });

  const auto seeds = device_seeds(c, c.velocity_devices);
  bool failed = false;
  {
    auto out = open_table(c, "velocity.csv");
    out << provenance(c, "velocity", seeds) << '\n';
    out << "delta_theta_deg,seed,current_density,velocity_m_per_s\n";
    for (const auto& u : units) {
      for (std::size_t k = 0; k < u.velocity.size(); ++k) {
        if (u.velocity[k]) {
          out << u.delta_theta << ',' << u.seed << ',' << c.j_grid[k] << ',' << *u.velocity[k] << '\n';
        } else {
          out << "# delta_theta=" << u.delta_theta << " seed=" << u.seed << " J=" << c.j_grid[k]
              << " failed: " << u.error << '\n';
          failed = true;
        }
      }
    }
  }
  {
    auto out = open_table(c, "critical_current.csv");
    out << provenance(c, "velocity", seeds) << '\n';
    out << "delta_theta_deg,seed,j_c,status\n";
    for (const auto& u : units) {
      out << u.delta_theta << ',' << u.seed << ',' << u.j_c << ',' << u.j_c_status << '\n';
      failed = failed || u.j_c_status == "failed";
    }
  }
  {
    auto out = open_table(c, "critical_current_mean.csv");
    out << provenance(c, "velocity", seeds) << '\n';
    out << "delta_theta_deg,devices,mean_j_c,std_j_c\n";
    for (double dt : c.delta_thetas) {
      std::vector<double> v;
      for (const auto& u : units) {
        if (u.delta_theta == dt && u.j_c_status == "bisected") v.push_back(u.j_c);
      }
      double mean = 0.0, var = 0.0;
      for (double x : v) mean += x;
      mean = v.empty() ? std::numeric_limits<double>::quiet_NaN() : mean / static_cast<double>(v.size());
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
      out << dt << ',' << v.size() << ',' << mean << ',' << sd << '\n';
    }
  }
  return failed ? 1 : 0;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const cli::Config& c) {
  if (c.devices < 1) throw UsageError("calibrate.devices must be at least 1");
  const auto seeds = device_seeds(c, c.devices);
  const auto traces = device::generate_library(
      c.material, c.geometry, c.library_delta_theta, seeds, c.drive, c.solver, c.workers,
      [](const device::DeviceResponseTrace& t) {
        std::clog << "device " << t.device_id << " seed " << t.seed << ": " << t.forward.size() - 1 << " + "
                  << t.backward.size() - 1 << " pulses, slope " << t.slope_mohm_per_pulse << " mOhm/pulse"
                  << (t.complete ? "" : ", STUCK") << '\n';
      });
  std::ostringstream name;
  name << "device_library_dtheta" << c.library_delta_theta << ".csv";
  {
    auto out = open_table(c, name.str());
    out << provenance(c, "calibrate", seeds) << '\n';
    device::write_library(out, traces);
  }
  std::vector<std::vector<double>> positions(c.position_checkpoints.size());
  {
    auto out = open_table(c, "positions.csv");
    out << provenance(c, "calibrate", seeds) << '\n';
    out << "device,seed,complete,pulses,r_h_mohm,position_nm\n";
    for (const auto& t : traces) {
      for (std::size_t k = 0; k < c.position_checkpoints.size(); ++k) {
        // a saturated or stalled sweep holds its last reading
        const auto idx = std::min<std::size_t>(static_cast<std::size_t>(c.position_checkpoints[k]), t.forward.size() - 1);
        const double r = t.forward[idx];
        const double x = device::position_from_resistance(r, c.geometry.length_nm, c.material.hall_R_max);
        positions[k].push_back(x);
        out << t.device_id << ',' << t.seed << ',' << (t.complete ? 1 : 0) << ',' << c.position_checkpoints[k] << ','
            << r << ',' << x << '\n';
      }
    }
  }
  {
    auto out = open_table(c, "position_summary.csv");
    out << provenance(c, "calibrate", seeds) << '\n';
    out << "pulses,devices,mean_position_nm,std_position_nm,min_position_nm,max_position_nm\n";
    for (std::size_t k = 0; k < positions.size(); ++k) {
      const auto& v = positions[k];
      double mean = 0.0, var = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      out << c.position_checkpoints[k] << ',' << v.size() << ',' << mean << ',' << sd << ',' << *lo << ',' << *hi
          << '\n';
    }
  }
  std::size_t stuck = 0;
  for (const auto& t : traces) stuck += t.complete ? 0 : 1;
  std::clog << traces.size() - stuck << " complete, " << stuck << " stuck\n";
  return 0;
}

// ---------------------------------------------------------------- experiments

datasets::Dataset load_dataset(const cli::Config& c) {
  if (c.dataset_path.empty()) {
    throw UsageError("no dataset: pass --dataset PATH, set DWS_MOUSE_PROTEIN_CSV, or set [dataset] path");
  }
  std::ifstream in(c.dataset_path);
  if (!in) throw UsageError("cannot open dataset " + c.dataset_path);
  auto data = datasets::load_mouse_protein(in, c.mouse, c.split_seed);
  data.note("dataset_path", c.dataset_path);
  return data;
}

experiments::ExperimentContext make_context(const cli::Config& c, const datasets::Dataset& data, bool needs_devices) {
  experiments::ExperimentContext ctx;
  ctx.data = &data;
  if (!needs_devices) return ctx;
  if (c.library_path.empty()) throw UsageError("device-backed variants need [experiment] library");
  std::ifstream in(c.library_path);
  if (!in) throw UsageError("cannot open device library " + c.library_path);
  ctx.library = experiments::share_library(device::read_library(in));
  if (c.experiment.backend == experiments::DeviceBackend::kMicromagnetic) {
    auto lib = ctx.library;
    ctx.factory = [lib, c](std::size_t index) -> std::unique_ptr<device::Synapse> {
      const auto& t = *lib[index];
      device::WireModel wire{c.material, grains_for(c, t.delta_theta_deg, t.seed), c.solver};
      return std::make_unique<device::DomainWallSynapse>(std::make_unique<device::MicromagBackend>(wire, c.drive),
                                                         t.slope_mohm_per_pulse, c.drive, t.device_id);
    };
  }
  return ctx;
}

int cmd_train(cli::Config c) {
  c.experiment.seeds = {c.seed_base};
  c.experiment.validate();
  const auto data = load_dataset(c);
  const auto ctx = make_context(c, data, c.experiment.variant != experiments::Variant::kIdeal);
  const auto r = experiments::run_single(c.experiment, ctx, c.seed_base);
  const auto prov = experiments::provenance_line(c.experiment);
  {
    auto out = open_table(c, "trace.csv");
    out << prov << '\n';
    pca::write_trace(out, r.trace);
  }
  {
    auto out = open_table(c, "pc_scatter.csv");
    experiments::write_pc_scatter(out, r, prov);
  }
  {
    auto out = open_table(c, "checkpoints.csv");
    out << prov << '\n' << "step,accuracy\n";
    for (std::size_t k = 0; k < r.checkpoint_steps.size(); ++k) {
      out << r.checkpoint_steps[k] << ',' << r.checkpoint_accuracy[k] << '\n';
    }
  }
  const double oracle = experiments::oracle_accuracy(c.experiment, data);
  {
    auto out = open_table(c, "result.csv");
    out << prov << '\n';
    for (const auto& [k, v] : data.provenance) out << "# " << k << '=' << v << '\n';
    out << "seed,accuracy,oracle_accuracy,norm1,norm2,angle_deg,w1,w2,b\n";
    out << r.seed << ',' << r.accuracy << ',' << oracle << ',' << r.final.norm1 << ',' << r.final.norm2 << ','
        << r.final.angle_deg << ',' << r.boundary.w[0] << ',' << r.boundary.w[1] << ',' << r.boundary.b << '\n';
  }
  std::cout << "accuracy " << r.accuracy << " (oracle " << oracle << "), |w1| " << r.final.norm1 << ", |w2| "
            << r.final.norm2 << ", angle " << r.final.angle_deg << " deg\n";
  return 0;
}

void write_run(const cli::Config& c, const experiments::RunResult& r, const std::string& suffix) {
  {
    auto out = open_table(c, "per_seed" + suffix + ".csv");
    experiments::write_per_seed(out, r);
  }
  {
    auto out = open_table(c, "aggregate" + suffix + ".csv");
    experiments::write_aggregate(out, r);
  }
  std::cout << experiments::to_string(r.config.variant)
            << (r.config.variant == experiments::Variant::kPopulation ? " n=" + std::to_string(r.config.n_population)
                                                                      : std::string())
            << ": " << r.completed << "/" << r.per_seed.size() << " seeds, accuracy " << r.mean_accuracy << " ± "
            << r.std_accuracy << '\n';
}

int cmd_montecarlo(const cli::Config& c) {
  c.experiment.validate();
  const auto data = load_dataset(c);
  const auto ctx = make_context(c, data, c.experiment.variant != experiments::Variant::kIdeal);
  const auto r = experiments::monte_carlo(c.experiment, ctx);
  write_run(c, r, "");
  return r.completed == r.per_seed.size() ? 0 : 1;
}

int cmd_sweep_population(cli::Config c) {
  if (c.population_n.empty()) throw UsageError("sweep-population needs a non-empty [encoder] sweep_n");
  c.experiment.variant = experiments::Variant::kPopulation;
  c.experiment.validate();
  const auto data = load_dataset(c);
  const auto ctx = make_context(c, data, true);
  const auto runs = experiments::sweep_population(c.experiment, ctx, c.population_n);
  auto ideal_config = c.experiment;
  ideal_config.variant = experiments::Variant::kIdeal;
  const auto ideal = experiments::monte_carlo(ideal_config, ctx);

  bool failed = ideal.completed != ideal.per_seed.size();
  for (const auto& r : runs) {
    write_run(c, r, "_n" + std::to_string(r.config.n_population));
    failed = failed || r.completed != r.per_seed.size();
  }
  write_run(c, ideal, "_ideal");
  auto out = open_table(c, "population_summary.csv");
  out << provenance(c, "sweep-population", c.experiment.seeds) << '\n';
  out << "variant,n,completed,mean_accuracy,std_accuracy\n";
  for (const auto& r : runs) {
    out << "population," << r.config.n_population << ',' << r.completed << ',' << r.mean_accuracy << ','
        << r.std_accuracy << '\n';
  }
  out << "ideal,0," << ideal.completed << ',' << ideal.mean_accuracy << ',' << ideal.std_accuracy << '\n';
  return failed ? 1 : 0;
}

int cmd_make_data(const cli::Config& c, std::uint64_t table_seed) {
  fs::create_directories(c.out_dir);
  const fs::path path = fs::path(c.out_dir) / "mouse_protein_synthetic.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  datasets::write_synthetic_mouse_table(out, table_seed);
  std::clog << "writing " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain-wall synapse simulator and crossbar PCA experiments"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", dataset_path;
  int workers = 1;
  std::uint64_t seed_base = 1;
  app.add_option("--config", config_path, "INI file overriding the defaults")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed-base", seed_base, "First seed; seeds run seed-base, seed-base+1, ...");
  app.add_option("--dataset", dataset_path, "Mouse protein table (else $DWS_MOUSE_PROTEIN_CSV)");

  auto* velocity = app.add_subcommand("velocity", "Wall velocity vs current and critical current per disorder level");
  auto* calibrate = app.add_subcommand("calibrate", "Record pulse staircases for a device library");
  auto* train = app.add_subcommand("train", "Train one crossbar (seed = seed-base)");
  auto* montecarlo = app.add_subcommand("montecarlo", "Train over many seeds and aggregate");
  auto* sweep = app.add_subcommand("sweep-population", "Monte Carlo for each population size, plus the ideal reference");
  auto* make_data = app.add_subcommand("make-data", "Write the synthetic stand-in mouse protein table");
  std::uint64_t table_seed = 1;
  make_data->add_option("--table-seed", table_seed, "Seed of the synthetic table");
  auto* print_config = app.add_subcommand("print-config", "Print the effective configuration as INI");

  CLI11_PARSE(app, argc, argv);

  try {
    cli::Config c = config_path.empty() ? cli::Config{} : cli::load_config(config_path);
    if (const char* env = std::getenv("DWS_MOUSE_PROTEIN_CSV"); env && *env) c.dataset_path = env;
    if (!dataset_path.empty()) c.dataset_path = dataset_path;
    c.out_dir = out_dir;
    c.workers = workers;
    c.seed_base = seed_base;
    cli::finalize(c);

    if (*print_config) {
      cli::write_default_config(std::cout, c);
      return 0;
    }
    if (*make_data) return cmd_make_data(c, table_seed);
    if (*velocity) return cmd_velocity(c);
    if (*calibrate) return cmd_calibrate(c);
    if (*train) return cmd_train(c);
    if (*montecarlo) return cmd_montecarlo(c);
    if (*sweep) return cmd_sweep_population(c);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidParameter& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
