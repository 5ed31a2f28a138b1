#pragma once

#include <vector>

#include "dwsyn/micromag/grains.hpp"
#include "dwsyn/micromag/material.hpp"
#include "dwsyn/micromag/spin_field.hpp"
#include "dwsyn/vec3.hpp"

namespace dwsyn::micromag {

/// Selects which contributions effective_field() sums.
struct FieldTerms {
  bool exchange = true;
  bool anisotropy = true;
  bool shape = true;
  bool external = true;
};

/// H_eff in A/m for every cell: exchange (discrete Laplacian, Neumann edges),
/// uniaxial anisotropy along the local grain axis, local shape anisotropy and the
/// external field.
std::vector<Vec3> effective_field(const SpinField& field, const MaterialParams& params,
                                  const GrainMap& grains, FieldTerms terms = {});

struct EnergyBreakdown {
  double exchange = 0.0;    // J
  double anisotropy = 0.0;
  double shape = 0.0;
  double zeeman = 0.0;
  double total() const { return exchange + anisotropy + shape + zeeman; }
};

/// Discrete energy whose gradient is exactly -μ0 Ms V H_eff.
EnergyBreakdown energy(const SpinField& field, const MaterialParams& params, const GrainMap& grains);

/// Explicit LLG right-hand side for one cell.
///
/// `advection` is (u·∇)m at the cell in 1/s. The implicit equation
///   ṁ = -γμ0 m×H + α m×ṁ - (u·∇)m + β m×(u·∇)m
/// is solved exactly for ṁ assuming |m| = 1: with T the explicit torque terms,
///   ṁ = (m·T) m + (T⊥ + α m×T) / (1 + α²).
Vec3 llg_rhs(const Vec3& m, const Vec3& h_eff, const Vec3& advection, const MaterialParams& params);

/// |ṁ - rhs_implicit(ṁ)| / max(|ṁ|, tiny), for checking llg_rhs.
double llg_implicit_residual(const Vec3& m, const Vec3& m_dot, const Vec3& h_eff,
                             const Vec3& advection, const MaterialParams& params);

/// Precession-free damping flow -γμ0 m×(m×H) / 2 used for relaxation.
Vec3 relaxation_rhs(const Vec3& m, const Vec3& h_eff, double gamma_mu0);

struct SolverOptions {
  double dt_ns = 2e-4;          // 0.2 ps
  double stability_limit = 0.1;  // γμ0 |H| dt must stay below this at startup
  /// When > 0, only columns within this many cells of the wall are integrated; cells
  /// further out keep their (relaxed domain) state. Zero integrates the whole wire.
  int active_margin_cells = 0;
  int window_refresh_steps = 20;
};

/// Fixed-step RK4 integrator with per-cell renormalization.
///
/// Holds its own workspace, so one solver should drive one field at a time.
class LlgSolver {
 public:
  LlgSolver(const MaterialParams& params, const GrainMap& grains, SolverOptions options = {});

  const MaterialParams& params() const { return params_; }
  const GrainMap& grains() const { return *grains_; }
  const SolverOptions& options() const { return options_; }

  /// One RK4 step with a constant current density (A/m²). Returns the largest
  /// pre-renormalization | |m| - 1 |.
  double step(SpinField& field, double current_density, double dt_ns);

  /// Integrates for `duration_ns` with the default dt, or the largest halving of it
  /// that passes the stability bound.
  void run(SpinField& field, double current_density, double duration_ns);

  /// Precession-free relaxation until the max cell torque |m×H|/|H| drops below
  /// `tolerance`. Throws RelaxationFailure after `max_ns`. Returns the final torque.
  /// A freshly seeded wall on a disordered 80 nm strip can take ~30 ns of this flow
  /// to shed its internal structure.
  double relax(SpinField& field, double tolerance = 1e-4, double max_ns = 100.0);

  /// max over cells of |m×H|/|H|.
  double max_torque(const SpinField& field) const;

  /// Throws IntegrationError when γμ0 max|H| dt exceeds the stability limit.
  void check_stability(const SpinField& field, double dt_ns) const;
  double stable_dt(const SpinField& field) const;

  /// Explicit ṁ (1/s) for every cell, full wire.
  std::vector<Vec3> rate(const SpinField& field, double current_density) const;

  /// (u·∇)m (1/s) for every cell: upwind difference in the current direction,
  /// projected onto the plane perpendicular to m.
  std::vector<Vec3> advection(const SpinField& field, double current_density) const;

  double last_max_drift() const { return last_max_drift_; }

 private:
  enum class Flow { kLlg, kRelax };

  void compute_rate(const std::vector<Vec3>& m, double u, Flow flow, int col_lo, int col_hi,
                    std::vector<Vec3>& out) const;
  void field_at(const std::vector<Vec3>& m, int ix, int iy, Vec3& h) const;
  void rk4(SpinField& field, double u, double dt_s, Flow flow, int col_lo, int col_hi);
  void update_window(const SpinField& field);

  MaterialParams params_;
  const GrainMap* grains_;
  SolverOptions options_;
  int nx_;
  int ny_;
  double exchange_coeff_;    // 2A/(μ0 Ms dx²)
  double anisotropy_coeff_;  // 2K/(μ0 Ms)
  double dx_m_;
  int col_lo_ = 0;
  int col_hi_ = 0;
  long steps_since_window_ = 0;
  double last_max_drift_ = 0.0;
  std::vector<Vec3> k1_, k2_, k3_, k4_, stage_;
};

/// Single RK4 step returning a new field (pure form of LlgSolver::step).
SpinField llg_step(const SpinField& field, const MaterialParams& params, const GrainMap& grains,
                   double current_density, double dt_ns);

}  // namespace dwsyn::micromag
