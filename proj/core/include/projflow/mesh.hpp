#pragma once

#include "projflow/types.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <utility>
#include <vector>

namespace projflow {

using Triangle = std::array<int, 3>;
using Edge = std::pair<int, int>;  // (lo, hi) vertex indices

/// Conforming triangulation with counter-clockwise triangles.
///
/// Instances are built through `Mesh::build` (or the helpers below), which
/// validates orientation and conformity; a constructed mesh is immutable.
class Mesh {
public:
  /// Validates and builds a mesh. When `boundary` is empty the boundary
  /// vertices are the endpoints of edges owned by a single triangle.
  static Mesh build(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                    std::vector<int> boundary = {});

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
  const std::vector<bool>& boundary_vertex_flags() const noexcept { return boundary_flags_; }
  const std::vector<Edge>& boundary_edges() const noexcept { return boundary_edges_; }

  /// All unique edges, sorted; `triangle_edges()[t][i]` indexes the edge
  /// opposite local vertex i of triangle t.
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<std::array<int, 3>>& triangle_edges() const noexcept { return tri_edges_; }

  std::size_t n_vertices() const noexcept { return vertices_.size(); }
  std::size_t n_triangles() const noexcept { return triangles_.size(); }

  /// Max element diameter.
  double h() const noexcept { return h_; }
  /// Max diameter over min inscribed-circle diameter.
  double quasi_uniformity() const noexcept { return quasi_uniformity_; }

  double area(int t) const;
  std::array<Vec2, 3> corners(int t) const;

private:
  Mesh() = default;

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<bool> boundary_flags_;
  std::vector<Edge> boundary_edges_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  double h_ = 0.0;
  double quasi_uniformity_ = 0.0;
};

/// n x n grid on the unit square, every cell split along its
/// lower-left/upper-right diagonal.
Mesh generate_structured_unit_square(int n);

struct MeshMetrics {
  double h = 0.0;
  double min_angle_deg = 0.0;
  double quasi_uniformity = 0.0;
  std::size_t n_vertices = 0;
  std::size_t n_triangles = 0;
  std::size_t n_edges = 0;
  double total_area = 0.0;
  std::vector<int> unused_vertices;
};

MeshMetrics mesh_metrics(const Mesh& mesh);

/// Text format:
///   vertices N / N lines "x y" / triangles M / M lines "i j k"
///   [boundary B / B vertex indices]
Mesh read_mesh(std::istream& in);
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);

}  // namespace projflow
