#include "projflow/mesh.hpp"

#include "projflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace projflow {

namespace {

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

double edge_length(Vec2 a, Vec2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

// Inscribed circle diameter: 4 * area / perimeter.
double inscribed_diameter(const std::array<Vec2, 3>& p) {
  const double a = edge_length(p[1], p[2]);
  const double b = edge_length(p[2], p[0]);
  const double c = edge_length(p[0], p[1]);
  const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
  return 4.0 * area / (a + b + c);
}

double diameter(const std::array<Vec2, 3>& p) {
  return std::max({edge_length(p[0], p[1]), edge_length(p[1], p[2]), edge_length(p[2], p[0])});
}

}  // namespace

Mesh Mesh::build(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                 std::vector<int> boundary) {
  if (triangles.empty()) throw MeshError("mesh has no triangles");
  const int nv = static_cast<int>(vertices.size());

  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int v : triangles[t]) {
      if (v < 0 || v >= nv) {
        throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(v) + " out of range");
      }
    }
    const auto& tri = triangles[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
    }
    const Vec2 a = vertices[tri[0]], b = vertices[tri[1]], c = vertices[tri[2]];
    if (cross(b - a, c - a) <= 0.0) {
      throw MeshError("triangle " + std::to_string(t) +
                      " has non-positive signed area (clockwise or degenerate)");
    }
  }

  Mesh m;
  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);

  // Edge ownership; insertion into an ordered map keeps numbering deterministic.
  std::map<Edge, std::vector<int>> owners;
  for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
    const auto& tri = m.triangles_[t];
    for (int i = 0; i < 3; ++i) {
      owners[make_edge(tri[(i + 1) % 3], tri[(i + 2) % 3])].push_back(static_cast<int>(t));
    }
  }
  std::map<Edge, int> edge_index;
  for (const auto& [edge, tris] : owners) {
    if (tris.size() > 2) {
      std::ostringstream msg;
      msg << "non-conforming mesh: edge (" << edge.first << ", " << edge.second << ") shared by "
          << tris.size() << " triangles:";
      for (int t : tris) msg << ' ' << t;
      throw MeshError(msg.str());
    }
    // A conforming, consistently oriented pair traverses the shared edge in
    // opposite directions; same direction means overlap or a fold.
    if (tris.size() == 2) {
      auto directed = [&](int t) {
        const auto& tri = m.triangles_[t];
        for (int i = 0; i < 3; ++i) {
          if (make_edge(tri[i], tri[(i + 1) % 3]) == edge) return tri[i] == edge.first;
        }
        return false;
      };
      if (directed(tris[0]) == directed(tris[1])) {
        throw MeshError("triangles " + std::to_string(tris[0]) + " and " +
                        std::to_string(tris[1]) + " overlap along edge (" +
                        std::to_string(edge.first) + ", " + std::to_string(edge.second) + ")");
      }
    }
    edge_index[edge] = static_cast<int>(m.edges_.size());
    m.edges_.push_back(edge);
    if (tris.size() == 1) m.boundary_edges_.push_back(edge);
  }

  m.tri_edges_.resize(m.triangles_.size());
  for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
    const auto& tri = m.triangles_[t];
    for (int i = 0; i < 3; ++i) {
      m.tri_edges_[t][i] = edge_index.at(make_edge(tri[(i + 1) % 3], tri[(i + 2) % 3]));
    }
  }

  m.boundary_flags_.assign(m.vertices_.size(), false);
  if (boundary.empty()) {
    for (const auto& [a, b] : m.boundary_edges_) {
      m.boundary_flags_[a] = true;
      m.boundary_flags_[b] = true;
    }
  } else {
    for (int v : boundary) {
      if (v < 0 || v >= nv) throw MeshError("boundary vertex " + std::to_string(v) + " out of range");
      m.boundary_flags_[v] = true;
    }
  }

  double min_inscribed = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < m.triangles_.size(); ++t) {
    const auto p = m.corners(static_cast<int>(t));
    m.h_ = std::max(m.h_, diameter(p));
    min_inscribed = std::min(min_inscribed, inscribed_diameter(p));
  }
  m.quasi_uniformity_ = m.h_ / min_inscribed;
  return m;
}

std::array<Vec2, 3> Mesh::corners(int t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

double Mesh::area(int t) const {
  const auto p = corners(t);
  return 0.5 * cross(p[1] - p[0], p[2] - p[0]);
}

Mesh generate_structured_unit_square(int n) {
  if (n < 1) throw MeshError("structured mesh needs n >= 1, got " + std::to_string(n));
  const int np = n + 1;
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(np) * np);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  std::vector<Triangle> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * np + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + np;
      const int v11 = v01 + 1;
      triangles.push_back({v00, v10, v11});
      triangles.push_back({v00, v11, v01});
    }
  }
  return Mesh::build(std::move(vertices), std::move(triangles));
}

MeshMetrics mesh_metrics(const Mesh& mesh) {
  MeshMetrics out;
  out.h = mesh.h();
  out.quasi_uniformity = mesh.quasi_uniformity();
  out.n_vertices = mesh.n_vertices();
  out.n_triangles = mesh.n_triangles();
  out.n_edges = mesh.edges().size();

  std::vector<bool> used(mesh.n_vertices(), false);
  double min_angle = 180.0;
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t) {
    const auto p = mesh.corners(static_cast<int>(t));
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = p[(i + 1) % 3] - p[i];
      const Vec2 b = p[(i + 2) % 3] - p[i];
      const double angle = std::atan2(std::abs(cross(a, b)), dot(a, b)) * 180.0 / std::numbers::pi;
      min_angle = std::min(min_angle, angle);
    }
    for (int v : mesh.triangles()[t]) used[v] = true;
    out.total_area += mesh.area(static_cast<int>(t));
  }
  out.min_angle_deg = min_angle;
  for (std::size_t v = 0; v < used.size(); ++v) {
    if (!used[v]) out.unused_vertices.push_back(static_cast<int>(v));
  }
  return out;
}

namespace {

// Line-oriented tokenizer that remembers where each token came from.
class TokenReader {
public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  bool next(std::string& tok) {
    while (!(line_stream_ >> tok)) {
      std::string line;
      if (!std::getline(in_, line)) return false;
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line_stream_.clear();
      line_stream_.str(line);
    }
    return true;
  }

  std::string expect(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(line_no_, std::string("unexpected end of file, expected ") + what);
    return tok;
  }

  template <typename T>
  T number(const char* what) {
    const std::string tok = expect(what);
    std::istringstream s(tok);
    T value{};
    s >> value;
    if (s.fail() || !s.eof()) throw ParseError(line_no_, "expected " + std::string(what) + ", got '" + tok + "'");
    return value;
  }

  std::size_t line() const noexcept { return line_no_; }

private:
  std::istream& in_;
  std::istringstream line_stream_;
  std::size_t line_no_ = 0;
};

}  // namespace

Mesh read_mesh(std::istream& in) {
  TokenReader reader(in);
  if (reader.expect("'vertices'") != "vertices") throw ParseError(reader.line(), "expected 'vertices <N>'");
  const long nv = reader.number<long>("vertex count");
  if (nv < 3) throw ParseError(reader.line(), "need at least 3 vertices");
  std::vector<Vec2> vertices(static_cast<std::size_t>(nv));
  for (auto& v : vertices) {
    v.x = reader.number<double>("x coordinate");
    v.y = reader.number<double>("y coordinate");
  }
  if (reader.expect("'triangles'") != "triangles") throw ParseError(reader.line(), "expected 'triangles <M>'");
  const long nt = reader.number<long>("triangle count");
  if (nt < 1) throw ParseError(reader.line(), "need at least one triangle");
  std::vector<Triangle> triangles(static_cast<std::size_t>(nt));
  for (auto& tri : triangles) {
    for (int& v : tri) {
      v = reader.number<int>("vertex index");
      if (v < 0 || v >= nv) throw ParseError(reader.line(), "vertex index " + std::to_string(v) + " out of range");
    }
  }
  std::vector<int> boundary;
  std::string tok;
  if (reader.next(tok)) {
    if (tok != "boundary") throw ParseError(reader.line(), "unexpected token '" + tok + "'");
    const long nb = reader.number<long>("boundary count");
    if (nb < 0) throw ParseError(reader.line(), "negative boundary count");
    boundary.resize(static_cast<std::size_t>(nb));
    for (int& v : boundary) {
      v = reader.number<int>("boundary vertex index");
      if (v < 0 || v >= nv) throw ParseError(reader.line(), "boundary index " + std::to_string(v) + " out of range");
    }
    if (reader.next(tok)) throw ParseError(reader.line(), "trailing token '" + tok + "'");
  }
  return Mesh::build(std::move(vertices), std::move(triangles), std::move(boundary));
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path.string());
  return read_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << std::setprecision(17);
  out << "vertices " << mesh.n_vertices() << '\n';
  for (const auto& v : mesh.vertices()) out << v.x << ' ' << v.y << '\n';
  out << "triangles " << mesh.n_triangles() << '\n';
  for (const auto& t : mesh.triangles()) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  std::vector<int> boundary;
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    if (mesh.boundary_vertex_flags()[v]) boundary.push_back(static_cast<int>(v));
  }
  out << "boundary " << boundary.size() << '\n';
  for (int v : boundary) out << v << '\n';
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path.string());
  write_mesh(mesh, out);
}

}  // namespace projflow
