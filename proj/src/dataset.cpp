#include "dwsyn/datasets/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "dwsyn/errors.hpp"

namespace dwsyn::datasets {

std::vector<std::vector<double>> Dataset::rows(const std::vector<std::size_t>& idx) const {
  std::vector<std::vector<double>> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(features.at(i));
  return out;
}

std::vector<int> Dataset::label_rows(const std::vector<std::size_t>& idx) const {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels.at(i));
  return out;
}

void stratified_split(Dataset& dataset, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  dataset.train.clear();
  dataset.test.clear();
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.labels.size(); ++i) {
      if (dataset.labels[i] == label) members.push_back(i);
    }
    if (members.size() < 2) throw InsufficientData("each label needs at least two samples to split");
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t n_train = (members.size() + 1) / 2;
    dataset.train.insert(dataset.train.end(), members.begin(), members.begin() + static_cast<long>(n_train));
    dataset.test.insert(dataset.test.end(), members.begin() + static_cast<long>(n_train), members.end());
  }
  std::sort(dataset.train.begin(), dataset.train.end());
  std::sort(dataset.test.begin(), dataset.test.end());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw DataError("non-numeric protein value '" + cell + "'");
  }
  if (used != cell.size()) throw DataError("non-numeric protein value '" + cell + "'");
  return v;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ";") + x;
  return s;
}

}  // namespace

Dataset load_mouse_protein(std::istream& table, const MouseProteinOptions& options, std::uint64_t seed) {
  std::string line;
  if (!std::getline(table, line)) throw DataError("empty mouse-protein table");
  const auto header = split_csv(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"MouseID", "Genotype", "Treatment", "Behavior"}) {
    if (!col.count(need)) throw DataError(std::string("table lacks the '") + need + "' column");
  }
  std::vector<std::string> proteins;
  for (const auto& h : header) {
    if (h.size() > 2 && h.substr(h.size() - 2) == "_N") proteins.push_back(h);
  }
  if (proteins.empty()) throw DataError("table has no protein columns");
  if (!options.proteins.empty()) {
    if (options.proteins.size() != options.selected_features) {
      throw InvalidParameter("protein list must name exactly " + std::to_string(options.selected_features));
    }
    for (const auto& p : options.proteins) {
      if (!col.count(p)) throw DataError("requested protein '" + p + "' is not in the table");
    }
  }

  Dataset all;
  all.feature_names = proteins;
  std::size_t rows_read = 0;
  while (std::getline(table, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(rows_read + 2) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    ++rows_read;
    if (cells[col["Treatment"]] != options.treatment) continue;
    if (!options.genotype.empty() && cells[col["Genotype"]] != options.genotype) continue;
    const std::string& behavior = cells[col["Behavior"]];
    int label;
    if (behavior == "C/S") {
      label = 1;
    } else if (behavior == "S/C") {
      label = 0;
    } else {
      throw DataError("unknown behaviour code '" + behavior + "'");
    }
    std::vector<double> f;
    for (const auto& p : proteins) f.push_back(parse_cell(cells[col[p]]));
    all.features.push_back(std::move(f));
    all.labels.push_back(label);
  }
  if (all.features.empty()) throw DataError("no rows pass the treatment/genotype filter");
  if (std::count(all.labels.begin(), all.labels.end(), 1) == 0 ||
      std::count(all.labels.begin(), all.labels.end(), 0) == 0) {
    throw DataError("the filtered rows contain only one behaviour class");
  }
  stratified_split(all, seed);

  // train-split statistics over non-missing values
  const std::size_t d = proteins.size();
  std::vector<double> train_mean(d, 0.0);
  std::vector<double> score(d, -1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s[2] = {0, 0}, s2[2] = {0, 0};
    double n[2] = {0, 0};
    for (std::size_t i : all.train) {
      const double v = all.features[i][j];
      if (std::isnan(v)) continue;
      const int l = all.labels[i];
      s[l] += v;
      s2[l] += v * v;
      n[l] += 1;
    }
    if (n[0] + n[1] == 0) {
      train_mean[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    train_mean[j] = (s[0] + s[1]) / (n[0] + n[1]);
    if (n[0] < 2 || n[1] < 2) continue;
    const double m0 = s[0] / n[0], m1 = s[1] / n[1];
    const double v0 = (s2[0] - n[0] * m0 * m0) / (n[0] - 1);
    const double v1 = (s2[1] - n[1] * m1 * m1) / (n[1] - 1);
    const double pooled = std::sqrt(0.5 * (v0 + v1));
    if (pooled > 0.0) score[j] = std::abs(m1 - m0) / pooled;
  }

  std::vector<std::size_t> chosen;
  if (!options.proteins.empty()) {
    for (const auto& p : options.proteins) {
      chosen.push_back(static_cast<std::size_t>(std::find(proteins.begin(), proteins.end(), p) - proteins.begin()));
    }
  } else {
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
    if (d < options.selected_features || score[order[options.selected_features - 1]] < 0.0) {
      throw DataError("not enough usable protein columns to select from");
    }
    chosen.assign(order.begin(), order.begin() + static_cast<long>(options.selected_features));
  }

  Dataset out;
  out.labels = all.labels;
  out.train = all.train;
  out.test = all.test;
  std::size_t imputed = 0;
  for (std::size_t j : chosen) {
    out.feature_names.push_back(proteins[j]);
    if (std::isnan(train_mean[j])) throw DataError("protein '" + proteins[j] + "' has no training values");
  }
  for (const auto& row : all.features) {
    std::vector<double> f;
    for (std::size_t j : chosen) {
      double v = row[j];
      if (std::isnan(v)) {
        v = train_mean[j];
        ++imputed;
      }
      f.push_back(v);
    }
    out.features.push_back(std::move(f));
  }

  out.note("source", "mouse-protein table");
  out.note("rows_read", std::to_string(rows_read));
  out.note("filter", "Treatment=" + options.treatment +
                         (options.genotype.empty() ? std::string() : " Genotype=" + options.genotype));
  out.note("rows_after_filter", std::to_string(out.features.size()));
  if (out.features.size() != options.expected_rows) {
    out.note("warning", "filtered row count " + std::to_string(out.features.size()) + " differs from expected " +
                            std::to_string(options.expected_rows));
  }
  out.note("proteins", join(out.feature_names));
  out.note("protein_selection", options.proteins.empty() ? "largest standardized class difference on train"
                                                         : "configured");
  out.note("imputed_values", std::to_string(imputed));
  out.note("split_seed", std::to_string(seed));
  out.note("train_size", std::to_string(out.train.size()));
  out.note("test_size", std::to_string(out.test.size()));
  return out;
}

Dataset normalize(const Dataset& dataset, double target_lo, double target_hi) {
  if (!(target_lo < target_hi)) throw InvalidParameter("normalization target must satisfy lo < hi");
  if (dataset.train.empty()) throw InsufficientData("normalization needs a train split");
  Dataset out = dataset;
  out.scaling.clear();
  const std::size_t d = dataset.dimension();
  double outside = 0;
  for (std::size_t j = 0; j < d; ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i : dataset.train) {
      lo = std::min(lo, dataset.features[i][j]);
      hi = std::max(hi, dataset.features[i][j]);
    }
    if (!(hi > lo)) throw DegenerateFeature(dataset.feature_names[j]);
    out.scaling.push_back({lo, hi, target_lo, target_hi});
  }
  for (auto& row : out.features) {
    for (std::size_t j = 0; j < d; ++j) row[j] = out.scaling[j].apply(row[j]);
  }
  for (std::size_t i : out.train) {
    // land exactly on the bounds despite rounding
    for (std::size_t j = 0; j < d; ++j) {
      if (dataset.features[i][j] == out.scaling[j].source_lo) out.features[i][j] = target_lo;
      if (dataset.features[i][j] == out.scaling[j].source_hi) out.features[i][j] = target_hi;
    }
  }
  for (std::size_t i : out.test) {
    for (double v : out.features[i]) outside += (v < target_lo || v > target_hi) ? 1 : 0;
  }
  std::ostringstream range;
  range << "[" << target_lo << ", " << target_hi << "] from train min/max";
  out.note("normalization", range.str());
  out.note("test_values_outside_range", std::to_string(static_cast<long>(outside)));
  return out;
}

namespace {

// Lower-triangular L with L Lᵀ = c; throws for a matrix that is not positive definite.
std::vector<double> cholesky(const pca::SymmetricMatrix& c) {
  const int n = c.n;
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = c(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) throw InvalidParameter("covariance is not positive definite");
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  return l;
}

}  // namespace

Dataset synthetic_gaussian_clusters(int dimension, std::size_t n_per_class, double mean_separation,
                                    const pca::SymmetricMatrix& covariance, std::uint64_t seed,
                                    std::vector<double> direction) {
  if (dimension < 2) throw InvalidParameter("synthetic clusters need at least two dimensions");
  if (covariance.n != dimension || covariance.a.size() != static_cast<std::size_t>(dimension) * dimension) {
    throw ShapeError("covariance does not match the dimension");
  }
  if (n_per_class < 2) throw InvalidParameter("need at least two samples per class");
  if (direction.empty()) {
    direction.assign(static_cast<std::size_t>(dimension), 0.0);
    direction[0] = 1.0;
  }
  if (static_cast<int>(direction.size()) != dimension) throw ShapeError("direction does not match the dimension");
  const double dn = std::sqrt(std::inner_product(direction.begin(), direction.end(), direction.begin(), 0.0));
  if (!(dn > 0.0)) throw InvalidParameter("direction must be nonzero");
  for (double& x : direction) x /= dn;

  const auto l = cholesky(covariance);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset ds;
  for (int j = 0; j < dimension; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  for (int label : {0, 1}) {
    const double offset = (label == 1 ? 0.5 : -0.5) * mean_separation;
    for (std::size_t s = 0; s < n_per_class; ++s) {
      std::vector<double> z(static_cast<std::size_t>(dimension));
      for (double& v : z) v = normal(rng);
      std::vector<double> x(static_cast<std::size_t>(dimension));
      for (int i = 0; i < dimension; ++i) {
        double v = offset * direction[i];
        for (int k = 0; k <= i; ++k) v += l[i * dimension + k] * z[k];
        x[i] = v;
      }
      ds.features.push_back(std::move(x));
      ds.labels.push_back(label);
    }
  }
  stratified_split(ds, seed ^ 0x9e3779b97f4a7c15ULL);
  // mixture covariance: shared covariance plus the between-class term
  ds.population_covariance = covariance;
  for (int i = 0; i < dimension; ++i) {
    for (int j = 0; j < dimension; ++j) {
      ds.population_covariance(i, j) += 0.25 * mean_separation * mean_separation * direction[i] * direction[j];
    }
  }
  ds.note("source", "synthetic gaussian clusters");
  ds.note("seed", std::to_string(seed));
  return ds;
}

const std::vector<std::string>& mouse_protein_names() {
  static const std::vector<std::string> names = {
      "DYRK1A_N", "ITSN1_N",  "BDNF_N",   "NR1_N",     "NR2A_N",   "pAKT_N",       "pBRAF_N",   "pCAMKII_N",
      "pCREB_N",  "pELK_N",   "pERK_N",   "pJNK_N",    "PKCA_N",   "pMEK_N",       "pNR1_N",    "pNR2A_N",
      "pNR2B_N",  "pPKCAB_N", "pRSK_N",   "AKT_N",     "BRAF_N",   "CAMKII_N",     "CREB_N",    "ELK_N",
      "ERK_N",    "GSK3B_N",  "JNK_N",    "MEK_N",     "TRKA_N",   "RSK_N",        "APP_N",     "Bcatenin_N",
      "SOD1_N",   "MTOR_N",   "P38_N",    "pMTOR_N",   "DSCR1_N",  "AMPKA_N",      "NR2B_N",    "pNUMB_N",
      "RAPTOR_N", "TIAM1_N",  "pP70S6_N", "NUMB_N",    "P70S6_N",  "pGSK3B_N",     "pPKCG_N",   "CDK5_N",
      "S6_N",     "ADARB1_N", "AcetylH3K9_N", "RRP1_N", "BAX_N",   "ARC_N",        "ERBB4_N",   "nNOS_N",
      "Tau_N",    "GFAP_N",   "GluR3_N",  "GluR4_N",   "IL1B_N",   "P3525_N",      "pCASP9_N",  "PSD95_N",
      "SNCA_N",   "Ubiquitin_N", "pGSK3B_Tyr216_N", "SHH_N", "BAD_N", "BCL2_N",    "pS6_N",     "pCFOS_N",
      "SYP_N",    "H3AcK18_N", "EGR1_N",  "H3MeK4_N",  "CaNA_N"};
  return names;
}

void write_synthetic_mouse_table(std::ostream& out, std::uint64_t seed) {
  const auto& names = mouse_protein_names();
  const std::size_t p = names.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Background: three shared latent factors with random loadings, plus mouse and
  // measurement noise, on a log scale around a per-protein base level.
  constexpr int kFactors = 3;
  std::vector<double> base(p), loading(p * kFactors), response(p, 0.0), missing_rate(p, 0.003);
  for (std::size_t j = 0; j < p; ++j) {
    base[j] = std::log(0.2 + 2.5 * unit(rng));
    for (int f = 0; f < kFactors; ++f) loading[j * kFactors + f] = 0.12 * normal(rng);
  }
  // Proteins that track the learning (context-shock) condition, sharing one direction.
  const std::vector<std::pair<std::string, double>> responders = {
      {"pERK_N", 0.27}, {"BRAF_N", 0.24}, {"SOD1_N", -0.25}, {"CaNA_N", 0.22},
      {"pPKCG_N", 0.14}, {"APP_N", -0.12}, {"Ubiquitin_N", 0.09}};
  for (const auto& [name, shift] : responders) {
    response[static_cast<std::size_t>(std::find(names.begin(), names.end(), name) - names.begin())] = shift;
  }
  for (const char* sparse : {"BAD_N", "BCL2_N", "H3MeK4_N", "EGR1_N", "H3AcK18_N"}) {
    missing_rate[static_cast<std::size_t>(std::find(names.begin(), names.end(), sparse) - names.begin())] = 0.2;
  }

  struct ClassSpec {
    const char* code;
    const char* genotype;
    const char* behavior;
    const char* treatment;
    int mice;
  };
  const ClassSpec classes[] = {
      {"c-CS-m", "Control", "C/S", "Memantine", 10}, {"c-SC-m", "Control", "S/C", "Memantine", 10},
      {"c-CS-s", "Control", "C/S", "Saline", 9},     {"c-SC-s", "Control", "S/C", "Saline", 9},
      {"t-CS-m", "Ts65Dn", "C/S", "Memantine", 9},   {"t-SC-m", "Ts65Dn", "S/C", "Memantine", 9},
      {"t-CS-s", "Ts65Dn", "C/S", "Saline", 7},      {"t-SC-s", "Ts65Dn", "S/C", "Saline", 9}};
  constexpr int kMeasurements = 15;

  out << "MouseID";
  for (const auto& n : names) out << ',' << n;
  out << ",Genotype,Treatment,Behavior,class\n";
  int mouse_no = 0;
  for (const auto& c : classes) {
    const double learn = std::string(c.behavior) == "C/S" ? 0.5 : -0.5;
    const double trisomy = std::string(c.genotype) == "Ts65Dn" ? 1.0 : 0.0;
    const double saline = std::string(c.treatment) == "Saline" ? 1.0 : 0.0;
    for (int m = 0; m < c.mice; ++m) {
      ++mouse_no;
      std::vector<double> mouse_offset(p);
      for (auto& v : mouse_offset) v = 0.05 * normal(rng);
      for (int r = 1; r <= kMeasurements; ++r) {
        double z[kFactors];
        for (double& v : z) v = normal(rng);
        out << mouse_no << '_' << r;
        for (std::size_t j = 0; j < p; ++j) {
          double log_v = base[j] + mouse_offset[j] + 0.06 * normal(rng);
          for (int f = 0; f < kFactors; ++f) log_v += loading[j * kFactors + f] * z[f];
          // the learning response is strongest under memantine in control mice
          log_v += response[j] * learn * (1.0 - 0.5 * trisomy) * (1.0 - 0.6 * saline);
          log_v += 0.05 * trisomy * std::sin(static_cast<double>(j));
          out << ',';
          if (unit(rng) >= missing_rate[j]) out << std::exp(log_v);
        }
        out << ',' << c.genotype << ',' << c.treatment << ',' << c.behavior << ',' << c.code << '\n';
      }
    }
  }
}

}  // namespace dwsyn::datasets
