#pragma once

#include "projflow/discretization.hpp"
#include "projflow/state.hpp"

#include <span>
#include <string>
#include <vector>

namespace projflow {

/// Energy quantities at one time level m. Column order of the CSV ledger
/// follows the first twelve fields.
struct LedgerRow {
  int step = 0;
  double t = 0.0;
  double norm_u_sq = 0.0;             // ||u^m||^2
  double norm_2u_minus_um1_sq = 0.0;  // ||2u^m - u^{m-1}||^2
  double dt2_gradp_sq = 0.0;          // (4 dt^2 / 3) ||grad p^m||^2
  double E_h = 0.0;                   // sum of the previous three
  double split_err_sq = 0.0;          // ||utilde^m - u^m||^2
  double second_diff_sq = 0.0;        // ||u^m - 2u^{m-1} + u^{m-2}||^2, m >= 2
  double grad_utilde_sq = 0.0;        // ||grad utilde^m||^2
  double f_dot_utilde = 0.0;          // (f^m, utilde^m)
  double residual_identity = 0.0;     // init / first-step / BDF2 energy identity
  double residual_pythagoras = 0.0;

  double utilde_norm_sq = 0.0;
  double f_norm_sq = 0.0;         // ||f^m||^2 of the time-averaged forcing
  double first_jump_sq = 0.0;     // ||utilde^1 - u^0||^2, row m = 1 only
  double weak_divergence = 0.0;   // max_q |(u^m, grad psi_q)| / (||u^m|| ||grad psi_q||)
  double skew_residual = 0.0;     // |b(w, utilde, utilde)| / (|w|_inf ||utilde||^2)
  double pressure_mean = 0.0;     // int p^m
};

using EnergyLedger = std::vector<LedgerRow>;

/// CSV header of the ledger.
inline constexpr const char* kLedgerCsvHeader =
    "step,t,norm_u_sq,norm_2u_minus_um1_sq,dt2_gradp_sq,E_h,split_err_sq,second_diff_sq,"
    "grad_utilde_sq,f_dot_utilde,residual_identity,residual_pythagoras";

/// Norm columns of a ledger row. `u_mm2` is u^{m-2} when m >= 2.
LedgerRow make_ledger_row(const Discretization& disc, double dt, const State& s, const YhElement* u_mm2);

// Residuals of the discrete identities, each |LHS - RHS| divided by the
// largest absolute term (0 when every term vanishes).

/// ||u^0||^2 + dt^2 ||grad p^0||^2 = ||utilde^0||^2.
double init_identity_residual(const Discretization& disc, const State& s0, double dt);

/// Backward-Euler first step:
///   (||u^1||^2 + ||utilde^1 - u^0||^2 - ||u^0||^2) / dt
///   + dt (||grad p^1||^2 - ||grad p^0||^2) + 2 mu ||grad utilde^1||^2 = 2 (f^1, utilde^1).
double first_step_identity_residual(const Discretization& disc, const State& s0, const State& s1,
                                    const Vector& f_load, double dt, double mu);

/// Per-step BDF2 balance between levels m and m+1 (m >= 1).
double step_identity_residual(const Discretization& disc, const State& sm, const State& smp1,
                              const Vector& f_load, double dt, double mu);

/// (||utilde||^2 - ||u||^2 - ||u - utilde||^2) / ||utilde||^2.
double pythagoras_residual(const Discretization& disc, const Vector& utilde, const YhElement& u);

/// max_q |(u, grad psi_q)| / (||u|| ||grad psi_q||).
double weak_divergence_residual(const Discretization& disc, const YhElement& u);

/// |v^T B(w) v| / (max|w_i| * v^T M_u v).
double skew_residual(const SparseMatrix& B, const Vector& w, const Vector& v, const SparseMatrix& M_u);

/// Bound of the discrete Gronwall lemma: given b_1..b_N (b[0] = b_1) and
/// a_{n+1} <= b_{n+1} + nu dt sum_{j=1}^{n+1} a_j, returns the bound on
/// a_1..a_N
///   a_{n+1} <= b_{n+1} + nu dt/(1 - nu dt) sum_{j=0}^{n} (1/(1 - nu dt))^{n-j} b_{j+1}.
std::vector<double> discrete_gronwall_bound(std::span<const double> b, double nu, double dt);

/// Closed form b_n (1/(1 - nu dt))^n, valid for non-decreasing b.
std::vector<double> discrete_gronwall_monotone_bound(std::span<const double> b, double nu, double dt);

struct EnergyCheckRow {
  int M = 0;
  double lhs = 0.0;             // left side of the global energy estimate
  double lhs_traced = 0.0;      // same with the unsimplified coefficients
  double gronwall_bound = 0.0;  // Gronwall bound on lhs_traced
  double rhs = 0.0;             // C e^{3 M dt} (||u0||^2 + dt sum_{m<=M} ||f^m||^2)
  double utilde_norm_sq = 0.0;  // ||utilde^M||^2, bounded by rhs as well
};

struct EnergyReport {
  std::vector<EnergyCheckRow> rows;
  double constant = 0.0;  // C = 10 + 14 dt
  double max_ratio = 0.0;  // max_M lhs / rhs
  bool final_form_applicable = false;  // dt <= 1/6
  bool holds = true;
  bool forcing_free = false;
  bool energy_non_increasing = true;  // E_h^M non-increasing in M (checked when forcing_free)
  std::vector<std::string> violations;
};

/// Checks the global energy estimate for every M with explicit constants.
/// `f_norms_sq[m-1]` is ||f^m||^2.
EnergyReport energy_inequality_check(const EnergyLedger& ledger, double u0_norm_sq,
                                     std::span<const double> f_norms_sq, double dt, double mu);

/// Bound on ||u_h - utilde_h||^2 in L2(0,T;L2) implied by the report: 1.5 dt rhs(N).
double splitting_error_bound(const EnergyReport& report, double dt);

/// Squared L2(0,T;L2) distances between the piecewise-constant interpolants.
struct InterpolantNorms {
  double u_minus_utilde = 0.0;   // ||u_h - utilde_h||^2
  double u_minus_ubar = 0.0;     // ||u_h - ubar_h||^2
  double ubar_minus_uhat = 0.0;  // ||ubar_h - uhat_h||^2
};

/// Requires every level 0..N in the trajectory.
InterpolantNorms interpolant_difference_norms(const Trajectory& traj, const Discretization& disc, double dt);

/// omega(tau) = int_0^{T - tau} ||utilde_h(t + tau) - utilde_h(t)||^2 dt, evaluated exactly
/// for the piecewise-constant interpolant utilde_h(t) = utilde^{m+1} on (t^m, t^{m+1}].
double time_modulus(const Trajectory& traj, const Discretization& disc, double dt, double tau);

}  // namespace projflow
