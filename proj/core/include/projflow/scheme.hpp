#pragma once

#include "projflow/diagnostics.hpp"
#include "projflow/discretization.hpp"
#include "projflow/linsolve.hpp"
#include "projflow/state.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace projflow {

using InitialField = std::function<Vec2(double, double)>;

struct SchemeConfig {
  int mesh_n = 8;
  std::shared_ptr<const Mesh> mesh;  // used instead of the structured mesh when set
  int degree_u = 2;
  int degree_p = 1;
  double dt = 0.01;
  double T = 0.1;
  double mu = 1.0;
  double tol_poisson = 1e-12;
  double tol_momentum = 1e-12;
  int store_every = 1;
  InitialField u0;  // empty: zero
  VectorFn f;       // empty: zero
  /// f may be sampled past T (loads near the final time are not clipped).
  bool forcing_defined_past_T = false;
  /// Throw IdentityViolation when a per-step gate fails.
  bool enforce_gates = true;
  /// When > 0, flag runs with h^{k+1} > coupling_constant * dt.
  double coupling_constant = 0.0;
};

/// Relative tolerances of the per-step assertions.
struct Gates {
  double init_identity = 1e-10;
  double first_step_identity = 1e-9;
  double step_identity = 1e-9;
  double pythagoras = 1e-10;
  double weak_divergence = 1e-10;
  double skew = 1e-12;
};

struct TimeGrid {
  int steps = 0;
  double dt = 0.0;
  bool adjusted = false;
};

/// N = T/dt when integral (to 1e-9 relative), otherwise dt = T / ceil(T/dt).
TimeGrid resolve_time_grid(double T, double dt);

/// Throws ConfigError on invalid parameters.
void validate(const SchemeConfig& cfg);

std::shared_ptr<const Mesh> mesh_for(const SchemeConfig& cfg);

/// Time stepper bound to one discretization and time grid.
class ProjectionScheme {
public:
  explicit ProjectionScheme(SchemeConfig cfg, std::shared_ptr<const Discretization> disc = nullptr);

  const SchemeConfig& config() const noexcept { return cfg_; }
  const Discretization& disc() const noexcept { return *disc_; }
  std::shared_ptr<const Discretization> disc_ptr() const noexcept { return disc_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  double dt() const noexcept { return grid_.dt; }
  double time(int m) const noexcept { return m * grid_.dt; }
  Gates& gates() noexcept { return gates_; }

  /// Load vector (f^m, phi_i), f^m averaged over [t^m - dt/2, t^m + dt/2].
  Vector load(int m) const;
  double load_norm_sq(int m) const;
  double initial_norm_sq() const;

  /// Level 0: L2 projection of u0, then the split into u^0 and p^0.
  State init_states(LedgerRow* row = nullptr);
  /// Level 1 by backward Euler.
  State first_step_backward_euler(const State& s0, LedgerRow* row = nullptr);
  /// Level m+1 from level m >= 1 by BDF2.
  State bdf2_step(const State& s, LedgerRow* row = nullptr);

private:
  Vector solve_pressure(const Vector& rhs) const;
  Vector solve_velocity(double mass_scale, const Vector& advect, const Vector& rhs, int step);
  void check(int step, double t, const char* what, double value, double gate) const;
  void check_finite(const State& s) const;

  SchemeConfig cfg_;
  std::shared_ptr<const Discretization> disc_;
  TimeGrid grid_;
  Gates gates_;
  MomentumSolver momentum_;
};

struct RunResult {
  TimeGrid grid;
  std::vector<std::string> warnings;
  bool coupling_satisfied = true;
  Trajectory trajectory;  // levels 0, s, 2s, ... and always N
  EnergyLedger ledger;
  std::vector<double> f_norms_sq;  // ||f^m||^2, m = 1..N
  double u0_norm_sq = 0.0;
  EnergyReport energy;
  State final_state;
  std::shared_ptr<const Discretization> disc;
};

/// init, backward-Euler first step, then BDF2 to T.
RunResult run(const SchemeConfig& cfg, std::shared_ptr<const Discretization> disc = nullptr);

}  // namespace projflow
