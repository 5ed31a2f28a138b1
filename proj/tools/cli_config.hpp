#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dwsyn/datasets/dataset.hpp"
#include "dwsyn/device/response.hpp"
#include "dwsyn/experiments/experiment.hpp"
#include "dwsyn/micromag/llg.hpp"
#include "dwsyn/micromag/material.hpp"
#include "dwsyn/micromag/wall.hpp"

namespace dwsyn::cli {

/// Everything one command needs. Defaults are the library defaults; an INI file
/// overrides any subset (see `write_default_config` for the full key list).
struct Config {
  micromag::MaterialParams material;
  micromag::WireGeometry geometry;
  // the CLI integrates near the wall only; the relaxed domains carry no torque
  micromag::SolverOptions solver{.active_margin_cells = 15};
  micromag::DriveSpec drive;
  double grain_diameter_nm = 10.0;

  // velocity
  std::vector<double> delta_thetas{0.0, 6.0, 8.0, 10.0};
  std::vector<double> j_grid{0.5e12, 1.0e12, 1.5e12, 2.0e12, 2.5e12};
  int velocity_devices = 3;  // disordered wires per Δθ
  double settle_ns = 2.0;
  double measure_ns = 4.0;
  double jc_lo = 0.05e12;
  double jc_hi = 4.0e12;
  double jc_tolerance = 0.02e12;
  micromag::CriticalCurrentOptions jc;

  // calibrate
  double library_delta_theta = 8.0;
  int devices = 30;
  device::RecordOptions record;
  std::vector<long> position_checkpoints{15, 30, 45, 60};

  // dataset
  std::string dataset_path;
  datasets::MouseProteinOptions mouse;
  std::uint64_t split_seed = 1;

  // experiment
  experiments::ExperimentConfig experiment;
  int seed_count = 1;
  std::string library_path;
  std::vector<int> population_n{4, 8, 20};

  std::uint64_t seed_base = 1;
  int workers = 1;
  std::string out_dir = ".";
};

/// Reads INI text over the defaults. Unknown sections or keys and malformed values
/// throw InvalidParameter naming the offending key.
Config parse_config(std::istream& ini, Config base = {});
Config load_config(const std::string& path, Config base = {});

/// Fills the seed lists from seed_base and seed_count, and checks that referenced
/// files exist. Throws InvalidParameter.
void finalize(Config& config);

/// The defaults as an INI file.
void write_default_config(std::ostream& out, const Config& config = {});

}  // namespace dwsyn::cli
