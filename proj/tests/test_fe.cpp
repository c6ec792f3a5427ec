#include "helpers.hpp"

#include "projflow/error.hpp"
#include "projflow/fe.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>

using namespace projflow;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Cell containing x (closed), with its reference coordinates.
std::pair<int, Vec2> locate(const Mesh& m, Vec2 x) {
  for (int t = 0; t < static_cast<int>(m.n_triangles()); ++t) {
    const Vec2 r = AffineMap::of(m.corners(t)).to_reference(x);
    if (r.x >= -1e-12 && r.y >= -1e-12 && r.x + r.y <= 1 + 1e-12) return {t, r};
  }
  return {-1, {}};
}

}  // namespace

TEST(ReferenceElement, KroneckerAtVertex) {
  const BasisEval b = eval_basis(1, {0.0, 0.0});
  EXPECT_EQ(b.n, 3);
  EXPECT_DOUBLE_EQ(b.values[0], 1.0);
  EXPECT_DOUBLE_EQ(b.values[1], 0.0);
  EXPECT_DOUBLE_EQ(b.values[2], 0.0);
}

TEST(ReferenceElement, EdgeMidpointP2) {
  const BasisEval b = eval_basis(2, {0.5, 0.0});
  EXPECT_EQ(b.n, 6);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(b.values[i], 0.0, 1e-15);
  EXPECT_NEAR(b.values[3], 1.0, 1e-15);  // midpoint of edge 0-1
  EXPECT_NEAR(b.values[4], 0.0, 1e-15);
  EXPECT_NEAR(b.values[5], 0.0, 1e-15);
}

TEST(ReferenceElement, KroneckerAllNodes) {
  for (int k : {1, 2}) {
    const ReferenceElement el(k);
    for (int j = 0; j < el.n_nodes(); ++j) {
      const BasisEval b = el.eval(el.nodes()[j]);
      for (int i = 0; i < el.n_nodes(); ++i) EXPECT_NEAR(b.values[i], i == j ? 1.0 : 0.0, 1e-14);
    }
  }
}

TEST(ReferenceElement, PartitionOfUnity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {1, 2}) {
    for (int s = 0; s < 50; ++s) {
      double x = u(rng), y = u(rng);
      if (x + y > 1) x = 1 - x, y = 1 - y;
      const BasisEval b = eval_basis(k, {x, y});
      double sum = 0.0;
      Vec2 g{};
      for (int i = 0; i < b.n; ++i) sum += b.values[i], g = g + b.grads[i];
      EXPECT_NEAR(sum, 1.0, 1e-14);
      EXPECT_NEAR(g.x, 0.0, 1e-14);
      EXPECT_NEAR(g.y, 0.0, 1e-14);
    }
    const BasisEval c = eval_basis(k, {1.0 / 3.0, 1.0 / 3.0});
    double sum = 0.0;
    for (int i = 0; i < c.n; ++i) sum += c.values[i];
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(ReferenceElement, GradientsMatchFiniteDifferences) {
  const double h = 1e-6;
  for (int k : {1, 2}) {
    const Vec2 p{0.21, 0.33};
    const BasisEval b = eval_basis(k, p);
    const BasisEval bx = eval_basis(k, {p.x + h, p.y}), bxm = eval_basis(k, {p.x - h, p.y});
    const BasisEval by = eval_basis(k, {p.x, p.y + h}), bym = eval_basis(k, {p.x, p.y - h});
    for (int i = 0; i < b.n; ++i) {
      EXPECT_NEAR(b.grads[i].x, (bx.values[i] - bxm.values[i]) / (2 * h), 1e-8);
      EXPECT_NEAR(b.grads[i].y, (by.values[i] - bym.values[i]) / (2 * h), 1e-8);
    }
  }
}

TEST(ReferenceElement, RejectsDegree) {
  EXPECT_THROW(eval_basis(3, {0, 0}), Error);
  EXPECT_THROW(eval_basis(0, {0, 0}), Error);
}

TEST(Quadrature, AreaAndFirstMoment) {
  const QuadratureRule& r = quad_rule(2);
  double area = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) area += r.weights[i], mx += r.weights[i] * r.points[i].x;
  EXPECT_NEAR(area, 0.5, 1e-15);
  EXPECT_NEAR(mx, 1.0 / 6.0, 1e-15);
  EXPECT_EQ(r.points.size(), 3u);
}

TEST(Quadrature, MonomialExactness) {
  for (int d = 0; d <= 6; ++d) {
    const QuadratureRule& r = quad_rule(d);
    EXPECT_GE(r.degree, d);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    EXPECT_NEAR(wsum, 0.5, 1e-15);
    for (int a = 0; a <= r.degree; ++a)
      for (int b = 0; a + b <= r.degree; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.points.size(); ++i)
          s += r.weights[i] * std::pow(r.points[i].x, a) * std::pow(r.points[i].y, b);
        EXPECT_NEAR(s, factorial(a) * factorial(b) / factorial(a + b + 2), 1e-15) << "d=" << d << " a=" << a << " b=" << b;
      }
  }
}

TEST(Quadrature, DegreeFiveOnX2Y2) {
  const QuadratureRule& r = quad_rule(5);
  double s = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i)
    s += r.weights[i] * std::pow(r.points[i].x * r.points[i].y, 2);
  EXPECT_NEAR(s, 1.0 / 180.0, 1e-15);
}

TEST(Quadrature, RejectsUnsupported) {
  EXPECT_THROW(quad_rule(7), Error);
  EXPECT_THROW(quad_rule(-1), Error);
}

TEST(FESpace, DofCounts) {
  auto m = testing_util::square(2);
  EXPECT_EQ(build_space(m, 1, 1, false, false).n_dofs(), 9);
  // brute-force edge count: distinct unordered vertex pairs over the triangles
  std::set<std::pair<int, int>> edges;
  for (const auto& t : m->triangles())
    for (int i = 0; i < 3; ++i) edges.insert(std::minmax(t[i], t[(i + 1) % 3]));
  EXPECT_EQ(edges.size(), 16u);
  EXPECT_EQ(build_space(m, 2, 1, false, false).n_dofs(), 9 + static_cast<int>(edges.size()));
  EXPECT_EQ(build_space(m, 1, 2, true, false).n_dofs(), 2);
}

TEST(FESpace, DirichletMaskOnBoundaryNodes) {
  auto m = testing_util::square(3);
  const FESpace V = build_space(m, 2, 2, true, false);
  const auto mask = V.dirichlet_mask();
  ASSERT_EQ(mask.size(), 2u * V.n_nodes());
  for (int c = 0; c < 2; ++c)
    for (int node = 0; node < V.n_nodes(); ++node) {
      const Vec2 x = V.node_coords()[node];
      const bool on = x.x == 0.0 || x.x == 1.0 || x.y == 0.0 || x.y == 1.0;
      EXPECT_EQ(mask[c * V.n_nodes() + node], on);
      EXPECT_EQ(V.dof(node, c) < 0, on);
    }
  const FESpace P = build_space(m, 1, 1, false, true);
  for (bool b : P.dirichlet_mask()) EXPECT_FALSE(b);
  EXPECT_TRUE(P.zero_mean());
}

TEST(FESpace, ConformityAcrossEdges) {
  auto m = testing_util::square(3);
  std::mt19937_64 rng(3);
  for (int k : {1, 2}) {
    const FESpace S = build_space(m, k, 1, false, false);
    const Vector c = testing_util::random_vector(S.n_dofs(), rng);
    // interior edges: shared by two cells
    std::map<int, std::vector<int>> owners;
    for (int t = 0; t < static_cast<int>(m->n_triangles()); ++t)
      for (int e : m->triangle_edges()[t]) owners[e].push_back(t);
    for (const auto& [e, ts] : owners) {
      if (ts.size() != 2) continue;
      const auto [a, b] = m->edges()[e];
      for (double s : {0.1, 0.5, 0.77}) {
        const Vec2 x = (1 - s) * m->vertices()[a] + s * m->vertices()[b];
        const Vec2 r0 = AffineMap::of(m->corners(ts[0])).to_reference(x);
        const Vec2 r1 = AffineMap::of(m->corners(ts[1])).to_reference(x);
        EXPECT_NEAR(S.value(as_span(c), ts[0], r0), S.value(as_span(c), ts[1], r1), 1e-13);
      }
    }
  }
}

TEST(FESpace, InterpolationReproducesPolynomials) {
  auto m = testing_util::square(3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {1, 2}) {
    const FESpace S = build_space(m, k, 1, false, false);
    auto g = [k](double x, double y) { return k == 1 ? 0.3 - 2 * x + 0.7 * y : 1 + x - y + 3 * x * y - x * x + 2 * y * y; };
    const Vector c = S.interpolate(std::function<double(double, double)>(g));
    for (int s = 0; s < 100; ++s) {
      const Vec2 x{u(rng), u(rng)};
      const auto [t, r] = locate(*m, x);
      ASSERT_GE(t, 0);
      EXPECT_NEAR(S.value(as_span(c), t, r), g(x.x, x.y), 1e-13);
    }
  }
}

TEST(FESpace, VectorInterpolationDropsBoundary) {
  auto m = testing_util::square(4);
  const FESpace V = build_space(m, 2, 2, true, false);
  auto g = [](double x, double y) { return Vec2{x * (1 - x) * y, -y * (1 - y)}; };
  const Vector c = V.interpolate(std::function<Vec2(double, double)>(g));
  EXPECT_EQ(c.size(), V.n_dofs());
  for (int node = 0; node < V.n_nodes(); ++node) {
    if (V.dof(node, 0) < 0) continue;
    const Vec2 x = V.node_coords()[node];
    EXPECT_DOUBLE_EQ(c[V.dof(node, 0)], g(x.x, x.y).x);
    EXPECT_DOUBLE_EQ(c[V.dof(node, 1)], g(x.x, x.y).y);
  }
}
