#pragma once

#include "projflow/mesh.hpp"
#include "projflow/types.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace projflow {

inline constexpr int kMaxLocalNodes = 6;

/// Lagrange basis values and reference gradients at one point.
struct BasisEval {
  int n = 0;
  std::array<double, kMaxLocalNodes> values{};
  std::array<Vec2, kMaxLocalNodes> grads{};
};

/// P1 or P2 Lagrange element on the reference triangle (0,0), (1,0), (0,1).
///
/// Node order: the three vertices, then (P2 only) the midpoints of edges
/// 0-1, 1-2 and 2-0.
class ReferenceElement {
public:
  explicit ReferenceElement(int degree);

  int degree() const noexcept { return degree_; }
  int n_nodes() const noexcept { return degree_ == 1 ? 3 : 6; }
  std::span<const Vec2> nodes() const noexcept { return {nodes_.data(), static_cast<std::size_t>(n_nodes())}; }

  BasisEval eval(Vec2 ref) const;

private:
  int degree_;
  std::array<Vec2, kMaxLocalNodes> nodes_{};
};

/// Alias matching the free-function form of the basis evaluation.
BasisEval eval_basis(int degree, Vec2 ref);

/// Symmetric rule on the reference triangle; weights sum to 1/2.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;  // polynomial exactness
};

/// Smallest tabulated rule with exactness >= required_degree (<= 6).
const QuadratureRule& quad_rule(int required_degree);

/// Affine map x = origin + J x_ref of one triangle.
struct AffineMap {
  Vec2 origin;
  Mat2 jac{};       // columns are the edge vectors p1-p0, p2-p0
  Mat2 inv_jac_t{};  // J^{-T}, maps reference gradients to physical ones
  double det = 0.0;

  static AffineMap of(const std::array<Vec2, 3>& corners);
  Vec2 map(Vec2 ref) const;
  Vec2 grad(Vec2 ref_grad) const;
  /// Inverse map; used for point location and tests.
  Vec2 to_reference(Vec2 x) const;
};

/// Scalar or 2-vector Lagrange space of degree k on a mesh.
///
/// Scalar Lagrange nodes are numbered vertices first, then edges (k = 2).
/// Degrees of freedom are the free nodes per component, in blocks:
/// dof(node, c) = c * n_free_nodes + free_index(node). With homogeneous
/// Dirichlet conditions boundary nodes are eliminated from the numbering,
/// so a coefficient vector always represents an element of the space.
class FESpace {
public:
  FESpace(std::shared_ptr<const Mesh> mesh, int degree, int components, bool homogeneous_dirichlet,
          bool zero_mean);

  const Mesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }
  const ReferenceElement& element() const noexcept { return element_; }
  int degree() const noexcept { return element_.degree(); }
  int components() const noexcept { return components_; }
  bool homogeneous_dirichlet() const noexcept { return dirichlet_; }
  bool zero_mean() const noexcept { return zero_mean_; }

  int n_nodes() const noexcept { return static_cast<int>(node_coords_.size()); }
  int n_free_nodes() const noexcept { return n_free_nodes_; }
  int n_dofs() const noexcept { return components_ * n_free_nodes_; }
  int n_local() const noexcept { return element_.n_nodes(); }

  const std::vector<Vec2>& node_coords() const noexcept { return node_coords_; }
  /// Global scalar node of local node i in cell t.
  int cell_node(int t, int i) const { return cell_nodes_[t][i]; }
  /// Degree of freedom of (node, component), or -1 when constrained.
  int dof(int node, int component) const {
    const int f = free_index_[node];
    return f < 0 ? -1 : component * n_free_nodes_ + f;
  }
  int free_index(int node) const { return free_index_[node]; }

  /// Per (component, node), component-major: true where the value is
  /// prescribed by the homogeneous Dirichlet condition.
  std::vector<bool> dirichlet_mask() const;

  /// Interpolate a field at the Lagrange nodes (constrained nodes dropped).
  Vector interpolate(const std::function<double(double, double)>& g) const;
  Vector interpolate(const std::function<Vec2(double, double)>& g) const;

  /// Value of the FE function in cell t at reference point ref.
  double value(std::span<const double> coeffs, int t, Vec2 ref, int component = 0) const;
  /// Physical gradient of one component of the FE function in cell t.
  Vec2 gradient(std::span<const double> coeffs, int t, Vec2 ref, int component = 0) const;

private:
  std::shared_ptr<const Mesh> mesh_;
  ReferenceElement element_;
  int components_;
  bool dirichlet_;
  bool zero_mean_;
  std::vector<Vec2> node_coords_;
  std::vector<bool> node_on_boundary_;
  std::vector<std::array<int, kMaxLocalNodes>> cell_nodes_;
  std::vector<int> free_index_;
  int n_free_nodes_ = 0;
};

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Build a space; mirrors the FESpace constructor.
FESpace build_space(std::shared_ptr<const Mesh> mesh, int degree, int components,
                    bool homogeneous_dirichlet, bool zero_mean);

}  // namespace projflow
