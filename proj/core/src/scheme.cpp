#include "projflow/scheme.hpp"

#include "projflow/assembly.hpp"
#include "projflow/error.hpp"

#include <cmath>
#include <sstream>

namespace projflow {

TimeGrid resolve_time_grid(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("dt and T must be positive");
  const double ratio = T / dt;
  const double nearest = std::round(ratio);
  TimeGrid g;
  if (nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * nearest) {
    g.steps = static_cast<int>(nearest);
    g.dt = T / g.steps;
    return g;
  }
  g.steps = static_cast<int>(std::ceil(ratio));
  g.dt = T / g.steps;
  g.adjusted = true;
  return g;
}

void validate(const SchemeConfig& cfg) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!cfg.mesh && cfg.mesh_n < 1) fail("mesh_n must be at least 1");
  if (cfg.degree_u != 1 && cfg.degree_u != 2) fail("degree_u must be 1 or 2");
  if (cfg.degree_p != 1 && cfg.degree_p != 2) fail("degree_p must be 1 or 2");
  if (!(cfg.dt > 0.0)) fail("dt must be positive");
  if (!(cfg.T > 0.0)) fail("T must be positive");
  if (!(cfg.mu > 0.0)) fail("mu must be positive");
  if (cfg.T < cfg.dt * (1.0 - 1e-12)) fail("T must be at least dt");
  if (!(cfg.tol_poisson > 0.0) || !(cfg.tol_momentum > 0.0)) fail("solver tolerances must be positive");
  if (cfg.store_every < 1) fail("store_every must be at least 1");
}

std::shared_ptr<const Mesh> mesh_for(const SchemeConfig& cfg) {
  if (cfg.mesh) return cfg.mesh;
  return std::make_shared<const Mesh>(generate_structured_unit_square(cfg.mesh_n));
}

ProjectionScheme::ProjectionScheme(SchemeConfig cfg, std::shared_ptr<const Discretization> disc)
    : cfg_(std::move(cfg)) {
  validate(cfg_);
  grid_ = resolve_time_grid(cfg_.T, cfg_.dt);
  if (disc) {
    if (disc->velocity().degree() != cfg_.degree_u || disc->pressure().degree() != cfg_.degree_p)
      throw ConfigError("discretization degrees do not match the configuration");
    disc_ = std::move(disc);
  } else {
    disc_ = std::make_shared<const Discretization>(mesh_for(cfg_), cfg_.degree_u, cfg_.degree_p);
  }
}

Vector ProjectionScheme::load(int m) const {
  if (!cfg_.f) return Vector::Zero(disc_->n_u());
  const double t = time(m);
  std::optional<double> horizon;
  if (!cfg_.forcing_defined_past_T) horizon = cfg_.T;
  return assemble_load(disc_->velocity(), cfg_.f, t - 0.5 * dt(), t + 0.5 * dt(), horizon);
}

double ProjectionScheme::load_norm_sq(int m) const {
  if (!cfg_.f) return 0.0;
  const double t = time(m);
  std::optional<double> horizon;
  if (!cfg_.forcing_defined_past_T) horizon = cfg_.T;
  return time_averaged_norm_sq(disc_->mesh(), cfg_.f, t - 0.5 * dt(), t + 0.5 * dt(), horizon);
}

double ProjectionScheme::initial_norm_sq() const {
  if (!cfg_.u0) return 0.0;
  return l2_norm_sq(disc_->mesh(), cfg_.u0);
}

Vector ProjectionScheme::solve_pressure(const Vector& rhs) const {
  SpdOptions opts;
  opts.tol = cfg_.tol_poisson;
  opts.zero_mean = true;
  opts.mean_mass = &disc_->ops().M_p;
  return solve_spd(disc_->ops().N_p, rhs, opts);
}

Vector ProjectionScheme::solve_velocity(double mass_scale, const Vector& advect, const Vector& rhs, int step) {
  const OperatorSet& ops = disc_->ops();
  const SparseMatrix B = assemble_convection(disc_->velocity(), advect);
  const SparseMatrix MA = SparseMatrix::linear_combination(mass_scale, ops.M_u, cfg_.mu, ops.A_u);
  const SparseMatrix A = SparseMatrix::linear_combination(1.0, MA, 1.0, B);
  try {
    return momentum_.solve(A, rhs, cfg_.tol_momentum);
  } catch (const SolverError& e) {
    throw StepFailure(step, time(step), std::string("momentum solve failed: ") + e.what());
  }
}

void ProjectionScheme::check(int step, double t, const char* what, double value, double gate) const {
  if (!cfg_.enforce_gates) return;
  if (!(value <= gate)) {
    std::ostringstream os;
    os << what << " residual " << value << " exceeds " << gate;
    throw IdentityViolation(step, t, os.str());
  }
}

void ProjectionScheme::check_finite(const State& s) const {
  if (!s.utilde_m.allFinite() || !s.u_m.base.allFinite() || !s.u_m.phi.allFinite() || !s.p_m.allFinite())
    throw StepFailure(s.m, s.t, "non-finite values in the solution");
}

State ProjectionScheme::init_states(LedgerRow* row) {
  const Discretization& d = *disc_;
  const int nu = d.n_u();
  State s;
  s.m = 0;
  s.t = 0.0;
  s.utilde_m = cfg_.u0 ? project_L2_onto_Uh(d.velocity(), cfg_.u0, d.ops().M_u) : Vector::Zero(nu);
  Vector p0;
  try {
    p0 = solve_pressure(d.ops().G.transpose_multiply(s.utilde_m) / dt());
  } catch (const SolverError& e) {
    throw StepFailure(0, 0.0, std::string("pressure solve failed: ") + e.what());
  }
  s.p_m = p0;
  s.u_m = YhElement{s.utilde_m, -dt() * p0};
  s.utilde_mm1 = s.utilde_m;
  s.u_mm1 = s.u_m;
  s.p_mm1 = s.p_m;
  check_finite(s);

  LedgerRow r = make_ledger_row(d, dt(), s, nullptr);
  r.residual_identity = init_identity_residual(d, s, dt());
  check(0, 0.0, "initial energy split", r.residual_identity, gates_.init_identity);
  check(0, 0.0, "weak divergence", r.weak_divergence, gates_.weak_divergence);
  check(0, 0.0, "Pythagoras split", r.residual_pythagoras, gates_.pythagoras);
  if (row) *row = r;
  return s;
}

State ProjectionScheme::first_step_backward_euler(const State& s0, LedgerRow* row) {
  const Discretization& d = *disc_;
  const OperatorSet& ops = d.ops();
  const double k = dt();
  const Vector f1 = load(1);
  const Vector rhs = d.inner_with_velocity_basis(s0.u_m) / k + ops.D.multiply(s0.p_m) + f1;
  const Vector ut = solve_velocity(1.0 / k, s0.utilde_m, rhs, 1);

  Vector dp;
  try {
    dp = solve_pressure(-ops.D.transpose_multiply(ut) / k);
  } catch (const SolverError& e) {
    throw StepFailure(1, time(1), std::string("pressure solve failed: ") + e.what());
  }

  State s;
  s.m = 1;
  s.t = time(1);
  s.utilde_m = ut;
  s.utilde_mm1 = s0.utilde_m;
  s.u_m = YhElement{ut, -k * dp};
  s.u_mm1 = s0.u_m;
  s.p_m = s0.p_m + dp;
  s.p_mm1 = s0.p_m;
  check_finite(s);

  LedgerRow r = make_ledger_row(d, k, s, nullptr);
  r.first_jump_sq = d.norm_sq(YhElement::from_velocity(ut, d.n_p()) - s0.u_m);
  r.f_dot_utilde = f1.dot(ut);
  r.f_norm_sq = load_norm_sq(1);
  r.residual_identity = first_step_identity_residual(d, s0, s, f1, k, cfg_.mu);
  r.skew_residual = skew_residual(assemble_convection(d.velocity(), s0.utilde_m), s0.utilde_m, ut, ops.M_u);
  check(1, s.t, "first-step energy identity", r.residual_identity, gates_.first_step_identity);
  check(1, s.t, "weak divergence", r.weak_divergence, gates_.weak_divergence);
  check(1, s.t, "Pythagoras split", r.residual_pythagoras, gates_.pythagoras);
  check(1, s.t, "convection skew symmetry", r.skew_residual, gates_.skew);
  if (row) *row = r;
  return s;
}

State ProjectionScheme::bdf2_step(const State& s, LedgerRow* row) {
  if (s.m < 1) throw Error("BDF2 step needs a state at level m >= 1");
  const Discretization& d = *disc_;
  const OperatorSet& ops = d.ops();
  const double k = dt();
  const int next = s.m + 1;
  const Vector advect = 2.0 * s.utilde_m - s.utilde_mm1;
  const Vector f = load(next);
  const Vector rhs = d.inner_with_velocity_basis(4.0 * s.u_m - s.u_mm1) / (2.0 * k) + ops.D.multiply(s.p_m) + f;
  const Vector ut = solve_velocity(1.5 / k, advect, rhs, next);

  Vector dp;
  try {
    dp = solve_pressure(-1.5 / k * ops.D.transpose_multiply(ut));
  } catch (const SolverError& e) {
    throw StepFailure(next, time(next), std::string("pressure solve failed: ") + e.what());
  }

  State n;
  n.m = next;
  n.t = time(next);
  n.utilde_m = ut;
  n.utilde_mm1 = s.utilde_m;
  n.u_m = YhElement{ut, -(2.0 * k / 3.0) * dp};
  n.u_mm1 = s.u_m;
  n.p_m = s.p_m + dp;
  n.p_mm1 = s.p_m;
  check_finite(n);

  LedgerRow r = make_ledger_row(d, k, n, &s.u_mm1);
  r.f_dot_utilde = f.dot(ut);
  r.f_norm_sq = load_norm_sq(next);
  r.residual_identity = step_identity_residual(d, s, n, f, k, cfg_.mu);
  r.skew_residual = skew_residual(assemble_convection(d.velocity(), advect), advect, ut, ops.M_u);
  check(next, n.t, "BDF2 energy identity", r.residual_identity, gates_.step_identity);
  check(next, n.t, "weak divergence", r.weak_divergence, gates_.weak_divergence);
  check(next, n.t, "Pythagoras split", r.residual_pythagoras, gates_.pythagoras);
  check(next, n.t, "convection skew symmetry", r.skew_residual, gates_.skew);
  if (row) *row = r;
  return n;
}

RunResult run(const SchemeConfig& cfg, std::shared_ptr<const Discretization> disc) {
  ProjectionScheme scheme(cfg, std::move(disc));
  RunResult out;
  out.grid = scheme.grid();
  out.disc = scheme.disc_ptr();
  if (out.grid.adjusted) {
    std::ostringstream os;
    os << "dt adjusted from " << cfg.dt << " to " << out.grid.dt << " so that T/dt = " << out.grid.steps;
    out.warnings.push_back(os.str());
  }
  if (cfg.coupling_constant > 0.0) {
    const double h = scheme.disc().mesh().h();
    const double lhs = std::pow(h, cfg.degree_u + 1);
    out.coupling_satisfied = lhs <= cfg.coupling_constant * out.grid.dt;
    if (!out.coupling_satisfied) {
      std::ostringstream os;
      os << "coupling h^(k+1) <= c dt violated: " << lhs << " > " << cfg.coupling_constant * out.grid.dt;
      out.warnings.push_back(os.str());
    }
  }
  out.u0_norm_sq = scheme.initial_norm_sq();

  const int N = out.grid.steps;
  out.ledger.reserve(N + 1);
  out.f_norms_sq.reserve(N);
  auto store = [&](const State& s) {
    if (s.m % cfg.store_every == 0 || s.m == N) out.trajectory.push_back(snapshot_of(s));
  };

  LedgerRow row;
  State s = scheme.init_states(&row);
  out.ledger.push_back(row);
  store(s);
  s = scheme.first_step_backward_euler(s, &row);
  out.ledger.push_back(row);
  out.f_norms_sq.push_back(row.f_norm_sq);
  store(s);
  while (s.m < N) {
    s = scheme.bdf2_step(s, &row);
    out.ledger.push_back(row);
    out.f_norms_sq.push_back(row.f_norm_sq);
    store(s);
  }
  out.energy = energy_inequality_check(out.ledger, out.u0_norm_sq, out.f_norms_sq, out.grid.dt, cfg.mu);
  out.final_state = std::move(s);
  return out;
}

}  // namespace projflow
