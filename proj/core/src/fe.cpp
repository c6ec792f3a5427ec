#include "projflow/fe.hpp"

#include "projflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace projflow {

ReferenceElement::ReferenceElement(int degree) : degree_(degree) {
  if (degree != 1 && degree != 2) {
    throw Error("Lagrange degree must be 1 or 2, got " + std::to_string(degree));
  }
  nodes_[0] = {0.0, 0.0};
  nodes_[1] = {1.0, 0.0};
  nodes_[2] = {0.0, 1.0};
  nodes_[3] = {0.5, 0.0};
  nodes_[4] = {0.5, 0.5};
  nodes_[5] = {0.0, 0.5};
}

BasisEval ReferenceElement::eval(Vec2 ref) const {
  BasisEval out;
  out.n = n_nodes();
  // Barycentric coordinates and their (constant) reference gradients.
  const std::array<double, 3> l = {1.0 - ref.x - ref.y, ref.x, ref.y};
  const std::array<Vec2, 3> dl = {Vec2{-1.0, -1.0}, Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
  if (degree_ == 1) {
    for (int i = 0; i < 3; ++i) {
      out.values[i] = l[i];
      out.grads[i] = dl[i];
    }
    return out;
  }
  for (int i = 0; i < 3; ++i) {
    out.values[i] = l[i] * (2.0 * l[i] - 1.0);
    out.grads[i] = (4.0 * l[i] - 1.0) * dl[i];
  }
  constexpr std::array<std::array<int, 2>, 3> mid = {{{0, 1}, {1, 2}, {2, 0}}};
  for (int e = 0; e < 3; ++e) {
    const int a = mid[e][0], b = mid[e][1];
    out.values[3 + e] = 4.0 * l[a] * l[b];
    out.grads[3 + e] = 4.0 * l[b] * dl[a] + 4.0 * l[a] * dl[b];
  }
  return out;
}

BasisEval eval_basis(int degree, Vec2 ref) { return ReferenceElement(degree).eval(ref); }

namespace {

// Orbit generators in barycentric form; weights normalized to sum 1 and
// scaled by the reference area when the rule is built.
void add_centroid(QuadratureRule& r, double w) {
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(w);
}

void add_orbit3(QuadratureRule& r, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (Vec2 p : {Vec2{a, a}, Vec2{b, a}, Vec2{a, b}}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

void add_orbit6(QuadratureRule& r, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (Vec2 p : {Vec2{a, b}, Vec2{b, a}, Vec2{a, c}, Vec2{c, a}, Vec2{b, c}, Vec2{c, b}}) {
    r.points.push_back(p);
    r.weights.push_back(w);
  }
}

QuadratureRule finish(QuadratureRule r, int degree) {
  for (double& w : r.weights) w *= 0.5;
  r.degree = degree;
  return r;
}

QuadratureRule make_rule(int degree) {
  QuadratureRule r;
  switch (degree) {
    case 1:
      add_centroid(r, 1.0);
      return finish(r, 1);
    case 2:
      add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
      return finish(r, 2);
    case 4:
      // Strang-Fix / Dunavant 6-point; constants refined to 25 digits.
      add_orbit3(r, 0.4459484909159648863183293, 0.2233815896780114656950070);
      add_orbit3(r, 0.09157621350977074345957146, 0.1099517436553218676383263);
      return finish(r, 4);
    case 5: {
      // Radon 7-point, closed form.
      const double s15 = std::sqrt(15.0);
      add_centroid(r, 9.0 / 40.0);
      add_orbit3(r, (6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
      add_orbit3(r, (6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
      return finish(r, 5);
    }
    case 6:
      // Dunavant 12-point; constants refined to 25 digits.
      add_orbit3(r, 0.2492867451709104212916386, 0.1167862757263793660252896);
      add_orbit3(r, 0.0630890144915022283403316, 0.05084490637020681692093681);
      add_orbit6(r, 0.05314504984481694735324967, 0.3103524510337844054166077,
                 0.08285107561837357519355346);
      return finish(r, 6);
    default:
      throw Error("no tabulated rule of degree " + std::to_string(degree));
  }
}

}  // namespace

const QuadratureRule& quad_rule(int required_degree) {
  static const std::array<QuadratureRule, 5> rules = {make_rule(1), make_rule(2), make_rule(4),
                                                      make_rule(5), make_rule(6)};
  if (required_degree < 0 || required_degree > 6) {
    throw Error("unsupported quadrature degree " + std::to_string(required_degree) + " (max 6)");
  }
  for (const auto& r : rules) {
    if (r.degree >= required_degree) return r;
  }
  return rules.back();
}

AffineMap AffineMap::of(const std::array<Vec2, 3>& p) {
  AffineMap m;
  m.origin = p[0];
  const Vec2 e1 = p[1] - p[0];
  const Vec2 e2 = p[2] - p[0];
  m.jac = {{{e1.x, e2.x}, {e1.y, e2.y}}};
  m.det = cross(e1, e2);
  // J^{-1} = [[e2.y, -e2.x], [-e1.y, e1.x]] / det; store its transpose.
  m.inv_jac_t = {{{e2.y / m.det, -e1.y / m.det}, {-e2.x / m.det, e1.x / m.det}}};
  return m;
}

Vec2 AffineMap::map(Vec2 r) const {
  return {origin.x + jac[0][0] * r.x + jac[0][1] * r.y, origin.y + jac[1][0] * r.x + jac[1][1] * r.y};
}

Vec2 AffineMap::grad(Vec2 g) const {
  return {inv_jac_t[0][0] * g.x + inv_jac_t[0][1] * g.y, inv_jac_t[1][0] * g.x + inv_jac_t[1][1] * g.y};
}

Vec2 AffineMap::to_reference(Vec2 x) const {
  const Vec2 d = x - origin;
  // J^{-1} d, with J^{-1} the transpose of inv_jac_t.
  return {inv_jac_t[0][0] * d.x + inv_jac_t[1][0] * d.y, inv_jac_t[0][1] * d.x + inv_jac_t[1][1] * d.y};
}

FESpace::FESpace(std::shared_ptr<const Mesh> mesh, int degree, int components,
                 bool homogeneous_dirichlet, bool zero_mean)
    : mesh_(std::move(mesh)),
      element_(degree),
      components_(components),
      dirichlet_(homogeneous_dirichlet),
      zero_mean_(zero_mean) {
  if (!mesh_) throw Error("FESpace needs a mesh");
  if (components != 1 && components != 2) throw Error("FESpace components must be 1 or 2");

  const auto& m = *mesh_;
  const int nv = static_cast<int>(m.n_vertices());
  node_coords_ = m.vertices();
  node_on_boundary_ = m.boundary_vertex_flags();
  if (degree == 2) {
    std::vector<bool> edge_on_boundary(m.edges().size(), false);
    // Boundary edges are a sorted subset of the sorted edge list.
    std::size_t b = 0;
    for (std::size_t e = 0; e < m.edges().size() && b < m.boundary_edges().size(); ++e) {
      if (m.edges()[e] == m.boundary_edges()[b]) {
        edge_on_boundary[e] = true;
        ++b;
      }
    }
    for (std::size_t e = 0; e < m.edges().size(); ++e) {
      const auto [a, c] = m.edges()[e];
      node_coords_.push_back(0.5 * (m.vertices()[a] + m.vertices()[c]));
      node_on_boundary_.push_back(edge_on_boundary[e]);
    }
  }

  cell_nodes_.resize(m.n_triangles());
  for (std::size_t t = 0; t < m.n_triangles(); ++t) {
    auto& cn = cell_nodes_[t];
    cn.fill(-1);
    for (int i = 0; i < 3; ++i) cn[i] = m.triangles()[t][i];
    if (degree == 2) {
      // Local midpoint 3 lies on edge 0-1 (opposite vertex 2), 4 on 1-2, 5 on 2-0.
      const auto& te = m.triangle_edges()[t];
      cn[3] = nv + te[2];
      cn[4] = nv + te[0];
      cn[5] = nv + te[1];
    }
  }

  free_index_.assign(node_coords_.size(), -1);
  for (std::size_t n = 0; n < node_coords_.size(); ++n) {
    if (dirichlet_ && node_on_boundary_[n]) continue;
    free_index_[n] = n_free_nodes_++;
  }
  // Vertices not used by any triangle carry no basis function.
  std::vector<bool> used(node_coords_.size(), false);
  for (const auto& cn : cell_nodes_) {
    for (int i = 0; i < n_local(); ++i) used[cn[i]] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    n_free_nodes_ = 0;
    for (std::size_t n = 0; n < node_coords_.size(); ++n) {
      free_index_[n] = (used[n] && !(dirichlet_ && node_on_boundary_[n])) ? n_free_nodes_++ : -1;
    }
  }
}

std::vector<bool> FESpace::dirichlet_mask() const {
  std::vector<bool> mask(static_cast<std::size_t>(components_) * node_coords_.size(), false);
  if (!dirichlet_) return mask;
  for (int c = 0; c < components_; ++c) {
    for (std::size_t n = 0; n < node_coords_.size(); ++n) {
      mask[c * node_coords_.size() + n] = node_on_boundary_[n];
    }
  }
  return mask;
}

Vector FESpace::interpolate(const std::function<double(double, double)>& g) const {
  if (components_ != 1) throw Error("scalar interpolation on a vector space");
  Vector out = Vector::Zero(n_dofs());
  for (int n = 0; n < n_nodes(); ++n) {
    if (const int d = dof(n, 0); d >= 0) out[d] = g(node_coords_[n].x, node_coords_[n].y);
  }
  return out;
}

Vector FESpace::interpolate(const std::function<Vec2(double, double)>& g) const {
  if (components_ != 2) throw Error("vector interpolation on a scalar space");
  Vector out = Vector::Zero(n_dofs());
  for (int n = 0; n < n_nodes(); ++n) {
    if (free_index_[n] < 0) continue;
    const Vec2 v = g(node_coords_[n].x, node_coords_[n].y);
    out[dof(n, 0)] = v.x;
    out[dof(n, 1)] = v.y;
  }
  return out;
}

double FESpace::value(std::span<const double> coeffs, int t, Vec2 ref, int component) const {
  const BasisEval b = element_.eval(ref);
  double v = 0.0;
  for (int i = 0; i < b.n; ++i) {
    if (const int d = dof(cell_nodes_[t][i], component); d >= 0) v += coeffs[d] * b.values[i];
  }
  return v;
}

Vec2 FESpace::gradient(std::span<const double> coeffs, int t, Vec2 ref, int component) const {
  const BasisEval b = element_.eval(ref);
  const AffineMap map = AffineMap::of(mesh_->corners(t));
  Vec2 g;
  for (int i = 0; i < b.n; ++i) {
    if (const int d = dof(cell_nodes_[t][i], component); d >= 0) g = g + coeffs[d] * map.grad(b.grads[i]);
  }
  return g;
}

FESpace build_space(std::shared_ptr<const Mesh> mesh, int degree, int components,
                    bool homogeneous_dirichlet, bool zero_mean) {
  return FESpace(std::move(mesh), degree, components, homogeneous_dirichlet, zero_mean);
}

}  // namespace projflow
