#include "projflow/assembly.hpp"

#include "projflow/error.hpp"
#include "projflow/linsolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace projflow {

namespace {

// Basis values and reference gradients at every point of a rule.
std::vector<BasisEval> tabulate(const ReferenceElement& el, const QuadratureRule& rule) {
  std::vector<BasisEval> tab;
  tab.reserve(rule.points.size());
  for (const Vec2& p : rule.points) tab.push_back(el.eval(p));
  return tab;
}

// Gauss-Legendre 3-point rule mapped to [a, b]: (nodes, weights).
std::array<std::pair<double, double>, 3> gauss3(double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double s = std::sqrt(0.6);
  return {{{mid - half * s, half * 5.0 / 9.0}, {mid, half * 8.0 / 9.0}, {mid + half * s, half * 5.0 / 9.0}}};
}

// Time average of f at a point over [t_lo, t_hi], zero past the horizon.
Vec2 time_average(const VectorFn& f, double t_lo, double t_hi, std::optional<double> horizon, double x,
                  double y) {
  const double upper = horizon ? std::min(t_hi, *horizon) : t_hi;
  if (upper <= t_lo) return {};
  Vec2 acc;
  for (const auto& [t, w] : gauss3(t_lo, upper)) acc = acc + w * f(t, x, y);
  return (1.0 / (t_hi - t_lo)) * acc;
}

// Scalar matrix over the free nodes, expanded block-diagonally to the
// components of the space.
template <typename Kernel>
SparseMatrix assemble_blocked(const FESpace& space, int quad_degree, Kernel&& kernel) {
  const auto& mesh = space.mesh();
  const auto& rule = quad_rule(quad_degree);
  const auto tab = tabulate(space.element(), rule);
  const int nl = space.n_local();
  const int nf = space.n_free_nodes();
  TripletBuilder builder(space.n_dofs(), space.n_dofs());
  builder.reserve(mesh.n_triangles() * nl * nl * space.components());

  std::array<std::array<double, kMaxLocalNodes>, kMaxLocalNodes> local{};
  std::array<Vec2, kMaxLocalNodes> grads{};
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const AffineMap map = AffineMap::of(mesh.corners(t));
    for (auto& row : local) row.fill(0.0);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const double jw = rule.weights[q] * map.det;
      const BasisEval& b = tab[q];
      for (int i = 0; i < nl; ++i) grads[i] = map.grad(b.grads[i]);
      kernel(t, map.map(rule.points[q]), jw, b, grads, local);
    }
    for (int i = 0; i < nl; ++i) {
      const int fi = space.free_index(space.cell_node(t, i));
      if (fi < 0) continue;
      for (int j = 0; j < nl; ++j) {
        const int fj = space.free_index(space.cell_node(t, j));
        if (fj < 0) continue;
        for (int c = 0; c < space.components(); ++c) builder.add(c * nf + fi, c * nf + fj, local[i][j]);
      }
    }
  }
  return builder.build();
}

}  // namespace

int assembly_degree(int degree_u, int degree_p) {
  return std::max({2 * degree_u, 3 * degree_u - 1, degree_u + degree_p});
}

SparseMatrix assemble_mass(const FESpace& space) {
  return assemble_blocked(space, 2 * space.degree(),
                          [&](int, Vec2, double jw, const BasisEval& b, const auto&, auto& local) {
                            for (int i = 0; i < b.n; ++i) {
                              for (int j = 0; j < b.n; ++j) local[i][j] += jw * b.values[i] * b.values[j];
                            }
                          });
}

SparseMatrix assemble_stiffness(const FESpace& space) {
  return assemble_blocked(space, std::max(1, 2 * space.degree() - 2),
                          [&](int, Vec2, double jw, const BasisEval& b, const auto& g, auto& local) {
                            for (int i = 0; i < b.n; ++i) {
                              for (int j = 0; j < b.n; ++j) local[i][j] += jw * dot(g[i], g[j]);
                            }
                          });
}

SparseMatrix assemble_convection(const FESpace& space_u, const Vector& w, int quad_degree) {
  if (space_u.components() != 2) throw Error("assemble_convection: velocity space must be vector-valued");
  if (w.size() != space_u.n_dofs()) {
    throw Error("assemble_convection: advecting field has " + std::to_string(w.size()) +
                " coefficients, space has " + std::to_string(space_u.n_dofs()));
  }
  if (quad_degree < 0) quad_degree = 3 * space_u.degree() - 1;
  const int nl = space_u.n_local();
  return assemble_blocked(
      space_u, quad_degree, [&](int t, Vec2, double jw, const BasisEval& b, const auto& g, auto& local) {
        // Advecting velocity and its divergence at the quadrature point.
        Vec2 wq;
        double div_w = 0.0;
        for (int i = 0; i < nl; ++i) {
          const int node = space_u.cell_node(t, i);
          const int d0 = space_u.dof(node, 0);
          if (d0 < 0) continue;
          const double wx = w[d0], wy = w[space_u.dof(node, 1)];
          wq = wq + b.values[i] * Vec2{wx, wy};
          div_w += wx * g[i].x + wy * g[i].y;
        }
        for (int i = 0; i < nl; ++i) {
          for (int j = 0; j < nl; ++j) {
            local[i][j] += jw * (dot(wq, g[j]) + 0.5 * div_w * b.values[j]) * b.values[i];
          }
        }
      });
}

Couplings assemble_couplings(const FESpace& space_u, const FESpace& space_p) {
  if (&space_u.mesh() != &space_p.mesh()) throw Error("assemble_couplings: spaces live on different meshes");
  if (space_u.components() != 2 || space_p.components() != 1) {
    throw Error("assemble_couplings: expected vector velocity and scalar pressure spaces");
  }
  const auto& mesh = space_u.mesh();
  const auto& rule = quad_rule(assembly_degree(space_u.degree(), space_p.degree()));
  const auto tab_u = tabulate(space_u.element(), rule);
  const auto tab_p = tabulate(space_p.element(), rule);
  const int nu = space_u.n_local();
  const int np = space_p.n_local();

  TripletBuilder d_builder(space_u.n_dofs(), space_p.n_dofs());
  TripletBuilder g_builder(space_u.n_dofs(), space_p.n_dofs());
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const AffineMap map = AffineMap::of(mesh.corners(t));
    // local_d[c][i][q] = (psi_q, d_c phi_i), local_g[c][i][q] = (phi_i, d_c psi_q)
    double local_d[2][kMaxLocalNodes][kMaxLocalNodes] = {};
    double local_g[2][kMaxLocalNodes][kMaxLocalNodes] = {};
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const double jw = rule.weights[k] * map.det;
      for (int i = 0; i < nu; ++i) {
        const Vec2 gu = map.grad(tab_u[k].grads[i]);
        for (int q = 0; q < np; ++q) {
          const Vec2 gp = map.grad(tab_p[k].grads[q]);
          const double psi = tab_p[k].values[q];
          const double phi = tab_u[k].values[i];
          local_d[0][i][q] += jw * psi * gu.x;
          local_d[1][i][q] += jw * psi * gu.y;
          local_g[0][i][q] += jw * phi * gp.x;
          local_g[1][i][q] += jw * phi * gp.y;
        }
      }
    }
    for (int i = 0; i < nu; ++i) {
      const int node = space_u.cell_node(t, i);
      for (int c = 0; c < 2; ++c) {
        const int row = space_u.dof(node, c);
        if (row < 0) continue;
        for (int q = 0; q < np; ++q) {
          const int col = space_p.dof(space_p.cell_node(t, q), 0);
          if (col < 0) continue;
          d_builder.add(row, col, local_d[c][i][q]);
          g_builder.add(row, col, local_g[c][i][q]);
        }
      }
    }
  }
  return {d_builder.build(), g_builder.build()};
}

OperatorSet assemble_operators(const FESpace& space_u, const FESpace& space_p) {
  OperatorSet ops;
  ops.M_u = assemble_mass(space_u);
  ops.A_u = assemble_stiffness(space_u);
  auto [d, g] = assemble_couplings(space_u, space_p);
  ops.D = std::move(d);
  ops.G = std::move(g);
  ops.N_p = assemble_stiffness(space_p);
  ops.M_p = assemble_mass(space_p);
  return ops;
}

namespace {

template <typename Field>
Vector load_impl(const FESpace& space_u, Field&& field) {
  if (space_u.components() != 2) throw Error("assemble_load: velocity space must be vector-valued");
  const auto& mesh = space_u.mesh();
  const auto& rule = quad_rule(kCallableQuadDegree);
  const auto tab = tabulate(space_u.element(), rule);
  Vector out = Vector::Zero(space_u.n_dofs());
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const AffineMap map = AffineMap::of(mesh.corners(t));
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Vec2 x = map.map(rule.points[k]);
      const Vec2 fv = field(x.x, x.y);
      const double jw = rule.weights[k] * map.det;
      for (int i = 0; i < space_u.n_local(); ++i) {
        const int node = space_u.cell_node(t, i);
        const int d0 = space_u.dof(node, 0);
        if (d0 < 0) continue;
        out[d0] += jw * fv.x * tab[k].values[i];
        out[space_u.dof(node, 1)] += jw * fv.y * tab[k].values[i];
      }
    }
  }
  return out;
}

}  // namespace

Vector assemble_load(const FESpace& space_u, const VectorFn& f, double t_lo, double t_hi,
                     std::optional<double> horizon) {
  if (!(t_lo < t_hi)) throw Error("assemble_load: empty time window");
  return load_impl(space_u, [&](double x, double y) { return time_average(f, t_lo, t_hi, horizon, x, y); });
}

Vector assemble_load(const FESpace& space_u, const std::function<Vec2(double, double)>& g) {
  return load_impl(space_u, g);
}

double l2_norm_sq(const Mesh& mesh, const std::function<Vec2(double, double)>& g) {
  const auto& rule = quad_rule(kCallableQuadDegree);
  double s = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const AffineMap map = AffineMap::of(mesh.corners(t));
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      const Vec2 x = map.map(rule.points[k]);
      const Vec2 v = g(x.x, x.y);
      s += rule.weights[k] * map.det * dot(v, v);
    }
  }
  return s;
}

double time_averaged_norm_sq(const Mesh& mesh, const VectorFn& f, double t_lo, double t_hi,
                             std::optional<double> horizon) {
  if (!(t_lo < t_hi)) throw Error("time_averaged_norm_sq: empty time window");
  return l2_norm_sq(mesh, [&](double x, double y) { return time_average(f, t_lo, t_hi, horizon, x, y); });
}

Vector project_L2_onto_Uh(const FESpace& space_u, const std::function<Vec2(double, double)>& g,
                          const SparseMatrix& M_u) {
  const Vector rhs = assemble_load(space_u, g);
  SpdOptions opts;
  opts.tol = 1e-14;
  return solve_spd(M_u, rhs, opts);
}

}  // namespace projflow
