#include "cli_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "dwsyn/errors.hpp"

namespace dwsyn::cli {

namespace {

struct Field {
  std::string section;
  std::string key;
  std::function<void(Config&, const std::string&)> set;
  std::function<std::string(const Config&)> get;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

template <class T>
T parse_number(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidParameter(where + ": not a number: '" + text + "'");
  }
  return v;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& where) {
  std::vector<T> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number<T>(item, where));
  }
  return out;
}

bool parse_bool(const std::string& text, const std::string& where) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidParameter(where + ": expected true or false, got '" + text + "'");
}

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += fmt(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s;
}

template <class T, class Get>
Field number(std::string section, std::string key, Get get) {
  const std::string where = section + "." + key;
  return {section, key,
          [get, where](Config& c, const std::string& s) { get(c) = parse_number<T>(s, where); },
          [get](Config c) {
            if constexpr (std::is_floating_point_v<T>) {
              return fmt(get(c));
            } else {
              return std::to_string(get(c));
            }
          }};
}

template <class T, class Get>
Field list(std::string section, std::string key, Get get) {
  const std::string where = section + "." + key;
  return {section, key, [get, where](Config& c, const std::string& s) { get(c) = parse_list<T>(s, where); },
          [get](Config c) { return fmt_list(get(c)); }};
}

template <class Get>
Field flag(std::string section, std::string key, Get get) {
  const std::string where = section + "." + key;
  return {section, key, [get, where](Config& c, const std::string& s) { get(c) = parse_bool(s, where); },
          [get](Config c) { return std::string(get(c) ? "true" : "false"); }};
}

template <class Get>
Field text(std::string section, std::string key, Get get) {
  return {section, key, [get](Config& c, const std::string& s) { get(c) = trim(s); },
          [get](Config c) { return get(c); }};
}

std::string join_names(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
  return s;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    // clang-format off
    f.push_back(number<double>("material", "exchange_A", [](Config& c) -> double& { return c.material.exchange_A; }));
    f.push_back(number<double>("material", "anisotropy_K", [](Config& c) -> double& { return c.material.anisotropy_K; }));
    f.push_back(number<double>("material", "saturation_Ms", [](Config& c) -> double& { return c.material.saturation_Ms; }));
    f.push_back(number<double>("material", "gilbert_alpha", [](Config& c) -> double& { return c.material.gilbert_alpha; }));
    f.push_back(number<double>("material", "nonadiabatic_beta", [](Config& c) -> double& { return c.material.nonadiabatic_beta; }));
    f.push_back(number<double>("material", "polarization_P", [](Config& c) -> double& { return c.material.polarization_P; }));
    f.push_back(number<double>("material", "gyromagnetic_gamma", [](Config& c) -> double& { return c.material.gyromagnetic_gamma; }));
    f.push_back(number<double>("material", "hall_R_max", [](Config& c) -> double& { return c.material.hall_R_max; }));
    f.push_back(number<double>("material", "demag_Nx", [](Config& c) -> double& { return c.material.demag_factors.x; }));
    f.push_back(number<double>("material", "demag_Ny", [](Config& c) -> double& { return c.material.demag_factors.y; }));
    f.push_back(number<double>("material", "demag_Nz", [](Config& c) -> double& { return c.material.demag_factors.z; }));

    f.push_back(number<double>("geometry", "length_nm", [](Config& c) -> double& { return c.geometry.length_nm; }));
    f.push_back(number<double>("geometry", "width_nm", [](Config& c) -> double& { return c.geometry.width_nm; }));
    f.push_back(number<double>("geometry", "thickness_nm", [](Config& c) -> double& { return c.geometry.thickness_nm; }));
    f.push_back(number<double>("geometry", "cell_nm", [](Config& c) -> double& { return c.geometry.cell_nm; }));
    f.push_back(number<double>("geometry", "grain_diameter_nm", [](Config& c) -> double& { return c.grain_diameter_nm; }));

    f.push_back(number<double>("solver", "dt_ns", [](Config& c) -> double& { return c.solver.dt_ns; }));
    f.push_back(number<double>("solver", "stability_limit", [](Config& c) -> double& { return c.solver.stability_limit; }));
    f.push_back(number<int>("solver", "active_margin_cells", [](Config& c) -> int& { return c.solver.active_margin_cells; }));

    f.push_back(number<double>("drive", "current_density", [](Config& c) -> double& { return c.drive.current_density; }));
    f.push_back(number<double>("drive", "pulse_ns", [](Config& c) -> double& { return c.drive.pulse_ns; }));
    f.push_back(number<double>("drive", "relax_ns", [](Config& c) -> double& { return c.drive.relax_ns; }));

    f.push_back(list<double>("velocity", "delta_theta_deg", [](Config& c) -> std::vector<double>& { return c.delta_thetas; }));
    f.push_back(list<double>("velocity", "current_densities", [](Config& c) -> std::vector<double>& { return c.j_grid; }));
    f.push_back(number<int>("velocity", "devices", [](Config& c) -> int& { return c.velocity_devices; }));
    f.push_back(number<double>("velocity", "settle_ns", [](Config& c) -> double& { return c.settle_ns; }));
    f.push_back(number<double>("velocity", "measure_ns", [](Config& c) -> double& { return c.measure_ns; }));
    f.push_back(number<double>("velocity", "jc_lo", [](Config& c) -> double& { return c.jc_lo; }));
    f.push_back(number<double>("velocity", "jc_hi", [](Config& c) -> double& { return c.jc_hi; }));
    f.push_back(number<double>("velocity", "jc_tolerance", [](Config& c) -> double& { return c.jc_tolerance; }));
    f.push_back(number<double>("velocity", "jc_travel_nm", [](Config& c) -> double& { return c.jc.travel_nm; }));
    f.push_back(number<double>("velocity", "jc_budget_ns", [](Config& c) -> double& { return c.jc.budget_ns; }));

    f.push_back(number<double>("calibrate", "delta_theta_deg", [](Config& c) -> double& { return c.library_delta_theta; }));
    f.push_back(number<int>("calibrate", "devices", [](Config& c) -> int& { return c.devices; }));
    f.push_back(number<double>("calibrate", "budget_factor", [](Config& c) -> double& { return c.record.budget_factor; }));
    f.push_back(number<int>("calibrate", "stall_pulses", [](Config& c) -> int& { return c.record.stall_pulses; }));
    f.push_back(list<long>("calibrate", "position_checkpoints", [](Config& c) -> std::vector<long>& { return c.position_checkpoints; }));

    f.push_back(text("dataset", "path", [](Config& c) -> std::string& { return c.dataset_path; }));
    f.push_back(text("dataset", "treatment", [](Config& c) -> std::string& { return c.mouse.treatment; }));
    f.push_back(text("dataset", "genotype", [](Config& c) -> std::string& { return c.mouse.genotype; }));
    f.push_back(number<std::size_t>("dataset", "expected_rows", [](Config& c) -> std::size_t& { return c.mouse.expected_rows; }));
    f.push_back(number<std::uint64_t>("dataset", "split_seed", [](Config& c) -> std::uint64_t& { return c.split_seed; }));
    f.push_back({"dataset", "proteins",
                 [](Config& c, const std::string& s) {
                   c.mouse.proteins.clear();
                   std::istringstream in(s);
                   std::string name;
                   while (std::getline(in, name, ',')) {
                     if (!trim(name).empty()) c.mouse.proteins.push_back(trim(name));
                   }
                 },
                 [](const Config& c) { return join_names(c.mouse.proteins); }});

    f.push_back({"experiment", "variant",
                 [](Config& c, const std::string& s) { c.experiment.variant = experiments::parse_variant(trim(s)); },
                 [](const Config& c) { return experiments::to_string(c.experiment.variant); }});
    f.push_back({"experiment", "backend",
                 [](Config& c, const std::string& s) {
                   const auto v = trim(s);
                   if (v == "surrogate") c.experiment.backend = experiments::DeviceBackend::kSurrogate;
                   else if (v == "micromagnetic") c.experiment.backend = experiments::DeviceBackend::kMicromagnetic;
                   else throw InvalidParameter("experiment.backend: expected surrogate or micromagnetic, got '" + s + "'");
                 },
                 [](const Config& c) {
                   return std::string(c.experiment.backend == experiments::DeviceBackend::kSurrogate ? "surrogate"
                                                                                                     : "micromagnetic");
                 }});
    f.push_back(number<int>("experiment", "seeds", [](Config& c) -> int& { return c.seed_count; }));
    f.push_back(number<long>("experiment", "steps", [](Config& c) -> long& { return c.experiment.steps; }));
    f.push_back(number<double>("experiment", "learning_rate", [](Config& c) -> double& { return c.experiment.learning_rate; }));
    f.push_back(number<double>("experiment", "init_range", [](Config& c) -> double& { return c.experiment.init_range; }));
    f.push_back(number<long>("experiment", "checkpoint_every", [](Config& c) -> long& { return c.experiment.checkpoint_every; }));
    f.push_back(flag("experiment", "fit_on_train", [](Config& c) -> bool& { return c.experiment.fit_on_train; }));
    f.push_back(flag("experiment", "center_inputs", [](Config& c) -> bool& { return c.experiment.center_inputs; }));
    f.push_back(flag("experiment", "carry_subpulse", [](Config& c) -> bool& { return c.experiment.carry_subpulse; }));
    f.push_back(text("experiment", "library", [](Config& c) -> std::string& { return c.library_path; }));
    f.push_back(number<double>("experiment", "delta_theta_deg", [](Config& c) -> double& { return c.experiment.delta_theta_deg; }));

    f.push_back(number<int>("encoder", "n", [](Config& c) -> int& { return c.experiment.n_population; }));
    f.push_back(number<double>("encoder", "spacing", [](Config& c) -> double& { return c.experiment.encoder_spacing; }));
    f.push_back(number<double>("encoder", "variance", [](Config& c) -> double& { return c.experiment.encoder_variance; }));
    f.push_back(list<int>("encoder", "sweep_n", [](Config& c) -> std::vector<int>& { return c.population_n; }));
    // clang-format on
    return f;
  }();
  return table;
}

}  // namespace

Config parse_config(std::istream& ini, Config base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(ini, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidParameter(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw InvalidParameter("config: key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) {
      const Field* match = nullptr;
      for (const auto& f : fields()) {
        if (f.section == section && f.key == key) match = &f;
      }
      if (!match) throw InvalidParameter("config: unknown key [" + section + "] " + key);
      match->set(base, value.get_value<std::string>());
    }
  }
  return base;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open config file " + path);
  return parse_config(in, std::move(base));
}

void finalize(Config& c) {
  if (c.seed_count < 1) throw InvalidParameter("experiment.seeds must be at least 1");
  if (c.workers < 1) throw InvalidParameter("workers must be at least 1");
  c.experiment.seeds.clear();
  for (int i = 0; i < c.seed_count; ++i) c.experiment.seeds.push_back(c.seed_base + static_cast<std::uint64_t>(i));
  c.experiment.workers = c.workers;
  for (const auto* path : {&c.dataset_path, &c.library_path}) {
    if (!path->empty() && !std::filesystem::exists(*path)) throw InvalidParameter("file not found: " + *path);
  }
  c.material.validate();
  c.geometry.validate();
  c.drive.validate();
}

void write_default_config(std::ostream& out, const Config& config) {
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out << (section.empty() ? "" : "\n") << '[' << f.section << "]\n";
      section = f.section;
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
}

}  // namespace dwsyn::cli
