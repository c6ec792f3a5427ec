#pragma once

#include "projflow/scheme.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace projflow {

/// Exact velocity/pressure pair with the forcing that makes it solve the
/// Navier-Stokes equations. Cases without a known solution (`exact` false)
/// only supply initial data and forcing.
struct ManufacturedCase {
  std::string name;
  VectorFn u;       // u(t, x, y)
  TensorFn grad_u;  // grad_u[i][j] = d u_i / d x_j
  ScalarFn p;       // zero mean for every t
  VectorFn f;       // empty: no forcing
  InitialField initial;  // initial data when it differs from u(0)
  bool exact = true;
};

/// psi = sin^2(pi x) sin^2(pi y) cos t, u = (psi_y, -psi_x),
/// p = cos(pi x) cos(pi y) cos t, f = u_t + (u . grad) u - mu lap u + grad p.
ManufacturedCase stream_vortex_case(double mu);

/// Stream vortex whose initial data carries an extra gradient,
/// u0 = u(0) + grad(sin^2(pi x) sin^2(pi y)). The gradient is removed by
/// the initial projection, so the exact solution is unchanged.
ManufacturedCase stream_vortex_gradient_case(double mu);

/// Initial data of the stream vortex with no forcing.
ManufacturedCase stream_vortex_free_case();

/// Rough initial data u0 = curl d, d = distance to the boundary; no forcing.
ManufacturedCase corner_vortex_case();

/// Everything zero.
ManufacturedCase zero_case();

/// Named case lookup: stream_vortex, stream_vortex_gradient, stream_vortex_free,
/// corner_vortex, zero.
ManufacturedCase case_by_name(const std::string& name, double mu);

/// Sets u0 and f of the configuration from the case.
void apply_case(SchemeConfig& cfg, const ManufacturedCase& mc);

struct ErrorNorms {
  double u_L2 = 0.0;          // ||u_h(T) - u(T)||, projected velocity
  double utilde_L2 = 0.0;     // ||utilde_h(T) - u(T)||
  double utilde_H1 = 0.0;     // |utilde_h(T) - u(T)|_{H1}
  double u_L2L2 = 0.0;        // (sum_m dt ||u^m - u(t^m)||^2)^{1/2} over stored levels m >= 1
  double utilde_L2L2 = 0.0;
  double p_L2 = 0.0;          // ||p_h(T) - p(T)||
};

/// Errors of the last stored level (and the time-discrete L2 norm over
/// all stored levels) against the exact fields.
ErrorNorms error_norms(const Trajectory& traj, const Discretization& disc, const ManufacturedCase& mc);

/// Squared L2 distance between a Y_h element and a vector field.
double yh_error_sq(const Discretization& disc, const YhElement& y, const std::function<Vec2(double, double)>& g);
/// Squared L2 and H1-seminorm distances between a U_h function and a field.
double velocity_error_sq(const Discretization& disc, const Vector& u, const std::function<Vec2(double, double)>& g);
double velocity_grad_error_sq(const Discretization& disc, const Vector& u,
                              const std::function<Mat2(double, double)>& grad_g);
double pressure_error_sq(const Discretization& disc, const Vector& p, const std::function<double(double, double)>& g);

enum class StudyMode { temporal, spatial, coupled };

StudyMode parse_study_mode(const std::string& s);
const char* to_string(StudyMode mode);

struct StudyPoint {
  int n = 0;
  double dt = 0.0;
  int degree_u = 2;
};

/// temporal: mesh_n fixed, dt, dt/2, dt/4, dt/8;
/// spatial: n in {4, 8, 16, 32} at the configured dt;
/// coupled: k = 1, n in {4, 8, 16, 32}, dt = 4 dt0 / n.
std::vector<StudyPoint> default_study_grid(StudyMode mode, const SchemeConfig& base);

struct StudyRow {
  StudyPoint point;
  ErrorNorms err;
  double split_err_sq = 0.0;  // ||u_h - utilde_h||^2 in L2(0,T;L2)
  double rate_u = 0.0;        // NaN on the first row
  double rate_p = 0.0;
  /// Temporal mode only: ||utilde_h(T) - utilde_h(T)|| against the previous
  /// (twice coarser) step on the same mesh, and the rate of these differences.
  double diff_L2 = 0.0;  // NaN on the first row and outside temporal mode
  double rate_self = 0.0;
  double max_identity_residual = 0.0;
  bool coupling_satisfied = true;
};

struct RateTable {
  StudyMode mode = StudyMode::temporal;
  std::vector<StudyRow> rows;
  bool monotone = true;
  std::vector<std::string> warnings;
};

RateTable convergence_study(StudyMode mode, const SchemeConfig& base, const ManufacturedCase& mc,
                            const std::vector<StudyPoint>& grid);

/// Columns n, dt, err_u_L2, err_u_H1, err_p_L2, rate_u, rate_p, then
/// diff_u_L2, rate_u_self (temporal mode; empty otherwise).
void write_rate_table_csv(const RateTable& table, std::ostream& out);

}  // namespace projflow
