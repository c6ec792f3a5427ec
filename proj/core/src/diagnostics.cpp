#include "projflow/diagnostics.hpp"

#include "projflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace projflow {
namespace {

double relative_residual_of(std::initializer_list<double> lhs_terms, double rhs) {
  double sum = -rhs;
  double scale = std::abs(rhs);
  for (double v : lhs_terms) {
    sum += v;
    scale = std::max(scale, std::abs(v));
  }
  return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

YhElement as_yh(const Discretization& disc, const Vector& u) { return YhElement::from_velocity(u, disc.n_p()); }

void require_contiguous(const Trajectory& traj) {
  if (traj.empty()) throw Error("trajectory is empty");
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj[i].m != static_cast<int>(i))
      throw Error("trajectory does not hold every time level (thinned storage?)");
}

}  // namespace

LedgerRow make_ledger_row(const Discretization& disc, double dt, const State& s, const YhElement* u_mm2) {
  LedgerRow r;
  r.step = s.m;
  r.t = s.t;
  r.norm_u_sq = disc.norm_sq(s.u_m);
  r.norm_2u_minus_um1_sq = disc.norm_sq(2.0 * s.u_m - s.u_mm1);
  r.dt2_gradp_sq = 4.0 * dt * dt / 3.0 * disc.pressure_grad_norm_sq(s.p_m);
  r.E_h = r.norm_u_sq + r.norm_2u_minus_um1_sq + r.dt2_gradp_sq;
  r.split_err_sq = disc.norm_sq(as_yh(disc, s.utilde_m) - s.u_m);
  if (u_mm2) r.second_diff_sq = disc.norm_sq(s.u_m - 2.0 * s.u_mm1 + *u_mm2);
  r.grad_utilde_sq = disc.velocity_grad_norm_sq(s.utilde_m);
  r.utilde_norm_sq = disc.velocity_norm_sq(s.utilde_m);
  r.weak_divergence = weak_divergence_residual(disc, s.u_m);
  r.residual_pythagoras = pythagoras_residual(disc, s.utilde_m, s.u_m);
  r.pressure_mean = disc.pressure_integral(s.p_m);
  return r;
}

double init_identity_residual(const Discretization& disc, const State& s0, double dt) {
  return relative_residual_of({disc.norm_sq(s0.u_m), dt * dt * disc.pressure_grad_norm_sq(s0.p_m)},
                              disc.velocity_norm_sq(s0.utilde_m));
}

double first_step_identity_residual(const Discretization& disc, const State& s0, const State& s1,
                                    const Vector& f_load, double dt, double mu) {
  const YhElement& u0 = s0.u_m;
  const YhElement& u1 = s1.u_m;
  const YhElement ut1 = as_yh(disc, s1.utilde_m);
  return relative_residual_of(
      {disc.norm_sq(u1) / dt, disc.norm_sq(ut1 - u0) / dt, -disc.norm_sq(u0) / dt,
       dt * disc.pressure_grad_norm_sq(s1.p_m), -dt * disc.pressure_grad_norm_sq(s0.p_m),
       2.0 * mu * disc.velocity_grad_norm_sq(s1.utilde_m)},
      2.0 * f_load.dot(s1.utilde_m));
}

double step_identity_residual(const Discretization& disc, const State& sm, const State& smp1,
                              const Vector& f_load, double dt, double mu) {
  const YhElement& un = smp1.u_m;
  const YhElement& u = sm.u_m;
  const YhElement& uo = sm.u_mm1;
  const YhElement ut = as_yh(disc, smp1.utilde_m);
  const double c = 4.0 * dt / 3.0;
  return relative_residual_of(
      {disc.norm_sq(un) / dt, -disc.norm_sq(u) / dt, disc.norm_sq(2.0 * un - u) / dt,
       -disc.norm_sq(2.0 * u - uo) / dt, disc.norm_sq(un - 2.0 * u + uo) / dt, 3.0 * disc.norm_sq(ut - un) / dt,
       c * disc.pressure_grad_norm_sq(smp1.p_m), -c * disc.pressure_grad_norm_sq(sm.p_m),
       4.0 * mu * disc.velocity_grad_norm_sq(smp1.utilde_m)},
      4.0 * f_load.dot(smp1.utilde_m));
}

double pythagoras_residual(const Discretization& disc, const Vector& utilde, const YhElement& u) {
  const double ut = disc.velocity_norm_sq(utilde);
  const double uu = disc.norm_sq(u);
  const double d = disc.norm_sq(as_yh(disc, utilde) - u);
  const double scale = std::max({ut, uu, d});
  return scale > 0.0 ? std::abs(ut - uu - d) / scale : 0.0;
}

double weak_divergence_residual(const Discretization& disc, const YhElement& u) {
  const double norm = std::sqrt(std::max(disc.norm_sq(u), 0.0));
  if (norm == 0.0) return 0.0;
  const Vector div = disc.weak_divergence(u);
  const Vector& gn = disc.pressure_basis_grad_norms();
  double worst = 0.0;
  for (Eigen::Index q = 0; q < div.size(); ++q)
    if (gn[q] > 0.0) worst = std::max(worst, std::abs(div[q]) / (norm * gn[q]));
  return worst;
}

double skew_residual(const SparseMatrix& B, const Vector& w, const Vector& v, const SparseMatrix& M_u) {
  const double wmax = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  const double vv = v.dot(M_u.multiply(v));
  if (wmax == 0.0 || vv == 0.0) return 0.0;
  return std::abs(v.dot(B.multiply(v))) / (wmax * vv);
}

std::vector<double> discrete_gronwall_bound(std::span<const double> b, double nu, double dt) {
  const double q = 1.0 - nu * dt;
  if (!(q > 0.0)) throw Error("discrete Gronwall bound needs 1 - nu*dt > 0");
  const double r = 1.0 / q;
  std::vector<double> out(b.size());
  double acc = 0.0;  // sum_{j<=n} r^{n-j} b_{j+1}
  for (std::size_t n = 0; n < b.size(); ++n) {
    if (b[n] < 0.0) throw Error("discrete Gronwall bound needs non-negative b");
    acc = acc * r + b[n];
    out[n] = b[n] + nu * dt * r * acc;
  }
  return out;
}

std::vector<double> discrete_gronwall_monotone_bound(std::span<const double> b, double nu, double dt) {
  const double q = 1.0 - nu * dt;
  if (!(q > 0.0)) throw Error("discrete Gronwall bound needs 1 - nu*dt > 0");
  std::vector<double> out(b.size());
  double rn = 1.0;
  for (std::size_t n = 0; n < b.size(); ++n) {
    rn /= q;
    out[n] = b[n] * rn;
  }
  return out;
}

EnergyReport energy_inequality_check(const EnergyLedger& ledger, double u0_norm_sq,
                                     std::span<const double> f_norms_sq, double dt, double mu) {
  EnergyReport rep;
  rep.constant = 10.0 + 14.0 * dt;
  rep.final_form_applicable = dt <= 1.0 / 6.0;
  const int N = static_cast<int>(ledger.size()) - 1;
  if (N < 1) return rep;
  if (static_cast<int>(f_norms_sq.size()) < N) throw Error("energy check needs ||f^m||^2 for every step");
  for (int m = 0; m <= N; ++m)
    if (ledger[m].step != m) throw Error("energy check needs a ledger row for every level");

  // b_M = 10 |u0|^2 + 2 dt sum_{m=2}^M |f^m|^2 + dt (7 |f^1|^2 + 14 |u0|^2), with nu = 2
  std::vector<double> b(N);
  double fsum_tail = 0.0;
  for (int M = 1; M <= N; ++M) {
    if (M >= 2) fsum_tail += f_norms_sq[M - 1];
    b[M - 1] = 10.0 * u0_norm_sq + 2.0 * dt * fsum_tail + dt * (7.0 * f_norms_sq[0] + 14.0 * u0_norm_sq);
  }
  const bool gronwall_ok = 1.0 - 2.0 * dt > 0.0;
  const std::vector<double> bound = gronwall_ok ? discrete_gronwall_bound(b, 2.0, dt) : std::vector<double>{};

  rep.forcing_free = std::all_of(f_norms_sq.begin(), f_norms_sq.begin() + N, [](double v) { return v == 0.0; });
  const double jump = ledger[1].first_jump_sq;
  double s2 = 0.0, s3 = 0.0, grad = 0.0, fsum = 0.0;
  const double slack = 1e-12;
  auto flag = [&](int M, const std::string& what) {
    std::ostringstream os;
    os << "M = " << M << ": " << what;
    rep.violations.push_back(os.str());
    rep.holds = false;
  };
  for (int M = 1; M <= N; ++M) {
    const LedgerRow& row = ledger[M];
    if (M >= 2) {
      s2 += row.second_diff_sq;
      s3 += row.split_err_sq;
    }
    grad += row.grad_utilde_sq;
    fsum += f_norms_sq[M - 1];

    EnergyCheckRow c;
    c.M = M;
    c.lhs = row.E_h + s2 + 2.0 * s3 + 4.0 * mu * dt * grad + 3.0 * jump;
    c.lhs_traced = row.E_h + s2 + (3.0 - 2.0 * dt) * s3 + 4.0 * mu * dt * grad + (7.0 - 14.0 * dt) * jump;
    c.gronwall_bound = gronwall_ok ? bound[M - 1] : INFINITY;
    c.rhs = rep.constant * std::exp(3.0 * M * dt) * (u0_norm_sq + dt * fsum);
    c.utilde_norm_sq = row.utilde_norm_sq;
    rep.rows.push_back(c);

    const double scale = std::max(1.0, c.rhs);
    if (gronwall_ok && c.lhs_traced > c.gronwall_bound + slack * std::max(1.0, c.gronwall_bound))
      flag(M, "summed energy exceeds its Gronwall bound");
    if (rep.final_form_applicable) {
      if (c.lhs > c.rhs + slack * scale) flag(M, "energy exceeds C e^{3 M dt} (|u0|^2 + dt sum |f|^2)");
      if (c.utilde_norm_sq > c.rhs + slack * scale) flag(M, "||utilde^M||^2 exceeds the energy bound");
    }
    if (c.rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, c.lhs / c.rhs);
    if (rep.forcing_free && M >= 2 && row.E_h > ledger[M - 1].E_h * (1.0 + 1e-12) + 1e-300) {
      rep.energy_non_increasing = false;
      flag(M, "E_h increased without forcing");
    }
  }
  return rep;
}

double splitting_error_bound(const EnergyReport& report, double dt) {
  return report.rows.empty() ? 0.0 : 1.5 * dt * report.rows.back().rhs;
}

InterpolantNorms interpolant_difference_norms(const Trajectory& traj, const Discretization& disc, double dt) {
  require_contiguous(traj);
  InterpolantNorms out;
  const int N = static_cast<int>(traj.size()) - 1;
  for (int m = 0; m < N; ++m) {
    const Snapshot& next = traj[m + 1];
    out.u_minus_utilde += disc.norm_sq(next.u - as_yh(disc, next.utilde));
    if (m == 0) {
      out.ubar_minus_uhat += disc.norm_sq(next.u - as_yh(disc, next.utilde));
      continue;
    }
    const Snapshot& cur = traj[m];
    const Snapshot& prev = traj[m - 1];
    out.u_minus_ubar += disc.norm_sq(next.u - 2.0 * cur.u + prev.u);
    const YhElement ubar = 2.0 * cur.u - prev.u;
    const Vector uhat = 2.0 * cur.utilde - prev.utilde;
    out.ubar_minus_uhat += disc.norm_sq(ubar - as_yh(disc, uhat));
  }
  out.u_minus_utilde *= dt;
  out.u_minus_ubar *= dt;
  out.ubar_minus_uhat *= dt;
  return out;
}

double time_modulus(const Trajectory& traj, const Discretization& disc, double dt, double tau) {
  require_contiguous(traj);
  const int N = static_cast<int>(traj.size()) - 1;
  const double T = N * dt;
  if (tau < 0.0 || tau >= T) throw Error("time modulus needs 0 <= tau < T");
  if (tau == 0.0) return 0.0;
  const double end = T - tau;

  std::vector<double> cuts{0.0, end};
  for (int j = 0; j <= N; ++j) {
    for (double c : {j * dt, j * dt - tau})
      if (c > 0.0 && c < end) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());

  auto level = [&](double t) { return std::clamp(static_cast<int>(std::floor(t / dt)) + 1, 1, N); };
  std::map<std::pair<int, int>, double> cache;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 1e-14 * T) continue;
    const double mid = 0.5 * (a + b);
    const int lo = level(mid), hi = level(mid + tau);
    if (lo == hi) continue;
    auto it = cache.find({lo, hi});
    if (it == cache.end()) {
      const Vector d = traj[hi].utilde - traj[lo].utilde;
      it = cache.emplace(std::make_pair(lo, hi), disc.velocity_norm_sq(d)).first;
    }
    total += (b - a) * it->second;
  }
  return total;
}

}  // namespace projflow
