#include "projflow/mms.hpp"

#include "projflow/assembly.hpp"
#include "projflow/error.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace projflow {
namespace {

constexpr double kPi = std::numbers::pi;

// S(x) = sin^2(pi x) and its first three derivatives.
double S0(double x) { const double s = std::sin(kPi * x); return s * s; }
double S1(double x) { return kPi * std::sin(2.0 * kPi * x); }
double S2(double x) { return 2.0 * kPi * kPi * std::cos(2.0 * kPi * x); }
double S3(double x) { return -4.0 * kPi * kPi * kPi * std::sin(2.0 * kPi * x); }

Vec2 vortex_u(double x, double y) { return {S0(x) * S1(y), -S1(x) * S0(y)}; }

// Integrates err(x, y) over the mesh with the rule used for callables.
template <class F>
double integrate(const Mesh& mesh, F&& err) {
  const auto& rule = quad_rule(kCallableQuadDegree);
  double s = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const AffineMap map = AffineMap::of(mesh.corners(t));
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      s += rule.weights[q] * map.det * err(t, rule.points[q], map.map(rule.points[q]));
  }
  return s;
}

Vec2 velocity_at(const FESpace& V, const Vector& u, int t, Vec2 ref) {
  return {V.value(as_span(u), t, ref, 0), V.value(as_span(u), t, ref, 1)};
}

}  // namespace

ManufacturedCase stream_vortex_case(double mu) {
  if (!(mu > 0.0)) throw ConfigError("stream_vortex needs mu > 0");
  ManufacturedCase mc;
  mc.name = "stream_vortex";
  mc.u = [](double t, double x, double y) { return std::cos(t) * vortex_u(x, y); };
  mc.grad_u = [](double t, double x, double y) {
    const double c = std::cos(t);
    return Mat2{{{c * S1(x) * S1(y), c * S0(x) * S2(y)}, {-c * S2(x) * S0(y), -c * S1(x) * S1(y)}}};
  };
  mc.p = [](double t, double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y) * std::cos(t); };
  mc.f = [mu](double t, double x, double y) {
    const double c = std::cos(t), s = std::sin(t);
    const Vec2 w = vortex_u(x, y);
    const Vec2 u = c * w;
    const double u1x = c * S1(x) * S1(y), u1y = c * S0(x) * S2(y);
    const double u2x = -c * S2(x) * S0(y), u2y = -c * S1(x) * S1(y);
    const double lap1 = c * (S2(x) * S1(y) + S0(x) * S3(y));
    const double lap2 = -c * (S3(x) * S0(y) + S1(x) * S2(y));
    const double px = -kPi * std::sin(kPi * x) * std::cos(kPi * y) * c;
    const double py = -kPi * std::cos(kPi * x) * std::sin(kPi * y) * c;
    return Vec2{-s * w.x + u.x * u1x + u.y * u1y - mu * lap1 + px,
                -s * w.y + u.x * u2x + u.y * u2y - mu * lap2 + py};
  };
  return mc;
}

ManufacturedCase stream_vortex_gradient_case(double mu) {
  ManufacturedCase mc = stream_vortex_case(mu);
  mc.name = "stream_vortex_gradient";
  VectorFn u = mc.u;
  mc.initial = [u](double x, double y) { return u(0.0, x, y) + Vec2{S1(x) * S0(y), S0(x) * S1(y)}; };
  return mc;
}

ManufacturedCase stream_vortex_free_case() {
  ManufacturedCase mc;
  mc.name = "stream_vortex_free";
  mc.u = [](double, double x, double y) { return vortex_u(x, y); };
  mc.exact = false;
  return mc;
}

ManufacturedCase corner_vortex_case() {
  ManufacturedCase mc;
  mc.name = "corner_vortex";
  // d = min(x, 1-x, y, 1-y); u = (d_y, -d_x) is piecewise constant.
  mc.u = [](double, double x, double y) {
    const double dist[4] = {x, 1.0 - x, y, 1.0 - y};
    int k = 0;
    for (int i = 1; i < 4; ++i)
      if (dist[i] < dist[k]) k = i;
    switch (k) {
      case 0: return Vec2{0.0, -1.0};
      case 1: return Vec2{0.0, 1.0};
      case 2: return Vec2{1.0, 0.0};
      default: return Vec2{-1.0, 0.0};
    }
  };
  mc.exact = false;
  return mc;
}

ManufacturedCase zero_case() {
  ManufacturedCase mc;
  mc.name = "zero";
  mc.u = [](double, double, double) { return Vec2{}; };
  mc.grad_u = [](double, double, double) { return Mat2{}; };
  mc.p = [](double, double, double) { return 0.0; };
  return mc;
}

ManufacturedCase case_by_name(const std::string& name, double mu) {
  if (name == "stream_vortex") return stream_vortex_case(mu);
  if (name == "stream_vortex_gradient") return stream_vortex_gradient_case(mu);
  if (name == "stream_vortex_free") return stream_vortex_free_case();
  if (name == "corner_vortex") return corner_vortex_case();
  if (name == "zero") return zero_case();
  if (name == "custom")
    throw ConfigError("case 'custom' needs callables; build a SchemeConfig through the library API");
  throw ConfigError("unknown case '" + name +
                    "' (expected stream_vortex, stream_vortex_gradient, stream_vortex_free, corner_vortex, zero)");
}

void apply_case(SchemeConfig& cfg, const ManufacturedCase& mc) {
  if (mc.initial) {
    cfg.u0 = mc.initial;
  } else if (mc.u) {
    VectorFn u = mc.u;
    cfg.u0 = [u](double x, double y) { return u(0.0, x, y); };
  } else {
    cfg.u0 = nullptr;
  }
  cfg.f = mc.f;
  cfg.forcing_defined_past_T = static_cast<bool>(mc.f);
}

double yh_error_sq(const Discretization& disc, const YhElement& y, const std::function<Vec2(double, double)>& g) {
  const FESpace& V = disc.velocity();
  const FESpace& P = disc.pressure();
  return integrate(disc.mesh(), [&](int t, Vec2 ref, Vec2 x) {
    const Vec2 v = velocity_at(V, y.base, t, ref) + P.gradient(as_span(y.phi), t, ref) - g(x.x, x.y);
    return dot(v, v);
  });
}

double velocity_error_sq(const Discretization& disc, const Vector& u, const std::function<Vec2(double, double)>& g) {
  const FESpace& V = disc.velocity();
  return integrate(disc.mesh(), [&](int t, Vec2 ref, Vec2 x) {
    const Vec2 v = velocity_at(V, u, t, ref) - g(x.x, x.y);
    return dot(v, v);
  });
}

double velocity_grad_error_sq(const Discretization& disc, const Vector& u,
                              const std::function<Mat2(double, double)>& grad_g) {
  const FESpace& V = disc.velocity();
  return integrate(disc.mesh(), [&](int t, Vec2 ref, Vec2 x) {
    const Mat2 G = grad_g(x.x, x.y);
    double s = 0.0;
    for (int c = 0; c < 2; ++c) {
      const Vec2 d = V.gradient(as_span(u), t, ref, c) - Vec2{G[c][0], G[c][1]};
      s += dot(d, d);
    }
    return s;
  });
}

double pressure_error_sq(const Discretization& disc, const Vector& p, const std::function<double(double, double)>& g) {
  const FESpace& P = disc.pressure();
  return integrate(disc.mesh(), [&](int t, Vec2 ref, Vec2 x) {
    const double d = P.value(as_span(p), t, ref) - g(x.x, x.y);
    return d * d;
  });
}

ErrorNorms error_norms(const Trajectory& traj, const Discretization& disc, const ManufacturedCase& mc) {
  if (traj.empty()) throw Error("error_norms: empty trajectory");
  if (!mc.u || !mc.grad_u || !mc.p) throw Error("error_norms: case '" + mc.name + "' has no exact solution");
  const Snapshot& last = traj.back();
  const double T = last.t;
  auto u_at = [&](double t) { return [&mc, t](double x, double y) { return mc.u(t, x, y); }; };

  ErrorNorms e;
  e.u_L2 = std::sqrt(yh_error_sq(disc, last.u, u_at(T)));
  e.utilde_L2 = std::sqrt(velocity_error_sq(disc, last.utilde, u_at(T)));
  e.utilde_H1 = std::sqrt(velocity_grad_error_sq(disc, last.utilde, [&](double x, double y) { return mc.grad_u(T, x, y); }));
  e.p_L2 = std::sqrt(pressure_error_sq(disc, last.p, [&](double x, double y) { return mc.p(T, x, y); }));

  double su = 0.0, sut = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double w = traj[i].t - traj[i - 1].t;
    su += w * yh_error_sq(disc, traj[i].u, u_at(traj[i].t));
    sut += w * velocity_error_sq(disc, traj[i].utilde, u_at(traj[i].t));
  }
  e.u_L2L2 = std::sqrt(su);
  e.utilde_L2L2 = std::sqrt(sut);
  return e;
}

StudyMode parse_study_mode(const std::string& s) {
  if (s == "temporal") return StudyMode::temporal;
  if (s == "spatial") return StudyMode::spatial;
  if (s == "coupled") return StudyMode::coupled;
  throw ConfigError("unknown study mode '" + s + "' (expected temporal, spatial, coupled)");
}

const char* to_string(StudyMode mode) {
  switch (mode) {
    case StudyMode::temporal: return "temporal";
    case StudyMode::spatial: return "spatial";
    case StudyMode::coupled: return "coupled";
  }
  return "?";
}

std::vector<StudyPoint> default_study_grid(StudyMode mode, const SchemeConfig& base) {
  std::vector<StudyPoint> grid;
  switch (mode) {
    case StudyMode::temporal:
      for (int i = 0; i < 4; ++i) grid.push_back({base.mesh_n, base.dt / (1 << i), base.degree_u});
      break;
    case StudyMode::spatial:
      for (int n : {4, 8, 16, 32}) grid.push_back({n, base.dt, base.degree_u});
      break;
    case StudyMode::coupled:
      for (int n : {4, 8, 16, 32}) grid.push_back({n, base.dt * 4.0 / n, 1});
      break;
  }
  return grid;
}

RateTable convergence_study(StudyMode mode, const SchemeConfig& base, const ManufacturedCase& mc,
                            const std::vector<StudyPoint>& grid) {
  RateTable table;
  table.mode = mode;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::shared_ptr<const Discretization> shared;
  Vector prev_final;
  for (const StudyPoint& pt : grid) {
    SchemeConfig cfg = base;
    cfg.mesh = nullptr;
    cfg.mesh_n = pt.n;
    cfg.dt = pt.dt;
    cfg.degree_u = pt.degree_u;
    cfg.store_every = 1;
    apply_case(cfg, mc);
    if (mode == StudyMode::coupled && cfg.coupling_constant <= 0.0) cfg.coupling_constant = 1.0;

    const bool reuse = mode == StudyMode::temporal && shared && table.rows.back().point.n == pt.n &&
                       table.rows.back().point.degree_u == pt.degree_u;
    const RunResult res = run(cfg, reuse ? shared : nullptr);
    StudyRow row;
    row.point = {pt.n, res.grid.dt, pt.degree_u};
    row.err = error_norms(res.trajectory, *res.disc, mc);
    row.split_err_sq = interpolant_difference_norms(res.trajectory, *res.disc, res.grid.dt).u_minus_utilde;
    row.coupling_satisfied = res.coupling_satisfied;
    for (const LedgerRow& r : res.ledger) row.max_identity_residual = std::max(row.max_identity_residual, r.residual_identity);
    row.rate_u = row.rate_p = row.diff_L2 = row.rate_self = nan;
    if (reuse) {
      row.diff_L2 = std::sqrt(res.disc->velocity_norm_sq(res.final_state.utilde_m - prev_final));
      const StudyRow& prev = table.rows.back();
      if (!std::isnan(prev.diff_L2))
        row.rate_self = std::log(prev.diff_L2 / row.diff_L2) / std::log(prev.point.dt / row.point.dt);
    }
    shared = res.disc;
    prev_final = res.final_state.utilde_m;
    if (!table.rows.empty()) {
      const StudyRow& prev = table.rows.back();
      const double ratio = mode == StudyMode::temporal ? prev.point.dt / row.point.dt
                                                       : static_cast<double>(row.point.n) / prev.point.n;
      row.rate_u = std::log(prev.err.utilde_L2 / row.err.utilde_L2) / std::log(ratio);
      row.rate_p = std::log(prev.err.p_L2 / row.err.p_L2) / std::log(ratio);
      if (row.err.utilde_L2 > prev.err.utilde_L2) {
        table.monotone = false;
        table.warnings.push_back("velocity error increased at n = " + std::to_string(row.point.n) +
                                 ", dt = " + std::to_string(row.point.dt));
      }
    }
    for (const std::string& w : res.warnings) table.warnings.push_back(w);
    table.rows.push_back(row);
  }
  return table;
}

void write_rate_table_csv(const RateTable& table, std::ostream& out) {
  out << "n,dt,err_u_L2,err_u_H1,err_p_L2,rate_u,rate_p,diff_u_L2,rate_u_self\n";
  out << std::setprecision(10);
  for (const StudyRow& r : table.rows) {
    out << r.point.n << ',' << r.point.dt << ',' << r.err.utilde_L2 << ',' << r.err.utilde_H1 << ',' << r.err.p_L2
        << ',';
    auto put = [&](double v) {
      if (!std::isnan(v)) out << v;
    };
    put(r.rate_u);
    out << ',';
    put(r.rate_p);
    out << ',';
    put(r.diff_L2);
    out << ',';
    put(r.rate_self);
    out << '\n';
  }
}

}  // namespace projflow
