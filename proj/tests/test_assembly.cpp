#include "helpers.hpp"

#include "projflow/assembly.hpp"
#include "projflow/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace projflow;

namespace {

// Direct quadrature of b(w, u, v) from point evaluations of the FE functions.
double trilinear_by_quadrature(const FESpace& V, const Vector& w, const Vector& u, const Vector& v) {
  const auto& rule = quad_rule(6);
  const auto& mesh = V.mesh();
  double s = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
    const AffineMap map = AffineMap::of(mesh.corners(t));
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 r = rule.points[q];
      const Vec2 wv{V.value(as_span(w), t, r, 0), V.value(as_span(w), t, r, 1)};
      const Vec2 uv{V.value(as_span(u), t, r, 0), V.value(as_span(u), t, r, 1)};
      const Vec2 vv{V.value(as_span(v), t, r, 0), V.value(as_span(v), t, r, 1)};
      const Vec2 gu0 = V.gradient(as_span(u), t, r, 0), gu1 = V.gradient(as_span(u), t, r, 1);
      const double divw = V.gradient(as_span(w), t, r, 0).x + V.gradient(as_span(w), t, r, 1).y;
      const Vec2 conv{dot(wv, gu0), dot(wv, gu1)};
      s += rule.weights[q] * map.det * (dot(conv, vv) + 0.5 * divw * dot(uv, vv));
    }
  }
  return s;
}

// (g, phi_i) by point evaluation of each basis function.
Vector load_by_quadrature(const FESpace& V, const std::function<Vec2(double, double)>& g) {
  const auto& rule = quad_rule(6);
  const auto& mesh = V.mesh();
  Vector out = Vector::Zero(V.n_dofs());
  for (int i = 0; i < V.n_dofs(); ++i) {
    Vector e = Vector::Zero(V.n_dofs());
    e[i] = 1.0;
    for (int t = 0; t < static_cast<int>(mesh.n_triangles()); ++t) {
      const AffineMap map = AffineMap::of(mesh.corners(t));
      for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 x = map.map(rule.points[q]);
        const Vec2 gv = g(x.x, x.y);
        const Vec2 ev{V.value(as_span(e), t, rule.points[q], 0), V.value(as_span(e), t, rule.points[q], 1)};
        out[i] += rule.weights[q] * map.det * dot(gv, ev);
      }
    }
  }
  return out;
}

}  // namespace

TEST(Mass, ReferenceTriangleP1) {
  auto m = std::make_shared<const Mesh>(Mesh::build({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}));
  const FESpace S = build_space(m, 1, 1, false, false);
  const Eigen::MatrixXd M = assemble_mass(S).to_dense();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(M(i, j), (i == j ? 2.0 : 1.0) / 24.0, 1e-16);
}

TEST(Mass, P1RowSumsAndTotal) {
  auto m = testing_util::square(4);
  const FESpace S = build_space(m, 1, 1, false, false);
  const SparseMatrix M = assemble_mass(S);
  const Vector ones = Vector::Ones(S.n_dofs());
  EXPECT_NEAR(ones.dot(M.multiply(ones)), 1.0, 1e-14);
  // row sum = integral of the hat function = area of its patch / 3
  std::vector<double> patch(m->n_vertices(), 0.0);
  for (int t = 0; t < static_cast<int>(m->n_triangles()); ++t)
    for (int v : m->triangles()[t]) patch[v] += m->area(t) / 3.0;
  const Vector rows = M.multiply(ones);
  for (int v = 0; v < static_cast<int>(m->n_vertices()); ++v) EXPECT_NEAR(rows[S.dof(v, 0)], patch[v], 1e-15);
}

TEST(Mass, P2ConstantAndSymmetry) {
  auto m = testing_util::square(3);
  const FESpace S = build_space(m, 2, 1, false, false);
  const SparseMatrix M = assemble_mass(S);
  const Vector ones = Vector::Ones(S.n_dofs());
  EXPECT_NEAR(ones.dot(M.multiply(ones)), 1.0, 1e-14);
  const Eigen::MatrixXd D = M.to_dense();
  EXPECT_NEAR((D - D.transpose()).norm(), 0.0, 1e-15);
  EXPECT_GT(D.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), 0.0);
}

TEST(Stiffness, KernelAndLinearEnergy) {
  auto m = testing_util::square(4);
  for (int k : {1, 2}) {
    const FESpace S = build_space(m, k, 1, false, false);
    const SparseMatrix A = assemble_stiffness(S);
    EXPECT_LT(A.multiply(Vector::Ones(S.n_dofs())).norm(), 1e-13);
    const Vector x = S.interpolate(std::function<double(double, double)>([](double x, double) { return x; }));
    EXPECT_NEAR(x.dot(A.multiply(x)), 1.0, 1e-13);
    const Vector xy = S.interpolate(std::function<double(double, double)>([](double x, double y) { return x + 2 * y; }));
    EXPECT_NEAR(xy.dot(A.multiply(xy)), 5.0, 1e-12);
  }
}

TEST(Stiffness, SymmetricPositiveOnDirichletSpace) {
  auto m = testing_util::square(3);
  const FESpace V = build_space(m, 2, 2, true, false);
  const Eigen::MatrixXd A = assemble_stiffness(V).to_dense();
  EXPECT_NEAR((A - A.transpose()).norm(), 0.0, 1e-13);
  EXPECT_GT(A.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff(), 0.0);
}

TEST(Convection, ZeroAdvectionIsZero) {
  auto m = testing_util::square(3);
  const FESpace V = build_space(m, 2, 2, true, false);
  EXPECT_EQ(assemble_convection(V, Vector::Zero(V.n_dofs())).frobenius_norm(), 0.0);
}

TEST(Convection, SkewSymmetricForAnyAdvection) {
  auto m = testing_util::square(3);
  std::mt19937_64 rng(11);
  for (int k : {1, 2}) {
    const FESpace V = build_space(m, k, 2, true, false);
    const Vector w = testing_util::random_vector(V.n_dofs(), rng);
    const Eigen::MatrixXd B = assemble_convection(V, w).to_dense();
    EXPECT_LT((B + B.transpose()).norm(), 1e-13 * std::max(1.0, B.norm()));
  }
}

TEST(Convection, MatchesDirectQuadrature) {
  auto m = testing_util::square(2);
  std::mt19937_64 rng(12);
  const FESpace V = build_space(m, 2, 2, true, false);
  for (int s = 0; s < 5; ++s) {
    const Vector w = testing_util::random_vector(V.n_dofs(), rng);
    const Vector u = testing_util::random_vector(V.n_dofs(), rng);
    const Vector v = testing_util::random_vector(V.n_dofs(), rng);
    const SparseMatrix B = assemble_convection(V, w);
    const double vbu = v.dot(B.multiply(u));
    EXPECT_NEAR(vbu, trilinear_by_quadrature(V, w, u, v), 1e-13);
    EXPECT_NEAR(vbu, -u.dot(B.multiply(v)), 1e-13);
  }
}

TEST(Couplings, IntegrationByParts) {
  auto m = testing_util::square(3);
  std::mt19937_64 rng(13);
  for (int k : {1, 2}) {
    const FESpace V = build_space(m, k, 2, true, false);
    const FESpace P = build_space(m, 1, 1, false, true);
    const Couplings c = assemble_couplings(V, P);
    EXPECT_EQ(c.D.rows(), V.n_dofs());
    EXPECT_EQ(c.D.cols(), P.n_dofs());
    EXPECT_LT((c.D.to_dense() + c.G.to_dense()).norm(), 1e-13);
    EXPECT_LT(c.G.multiply(Vector::Ones(P.n_dofs())).norm(), 1e-13);
  }
}

TEST(Couplings, WeakDivergenceAgainstQuadrature) {
  auto m = testing_util::square(2);
  std::mt19937_64 rng(14);
  const FESpace V = build_space(m, 2, 2, true, false);
  const FESpace P = build_space(m, 1, 1, false, true);
  const Couplings c = assemble_couplings(V, P);
  const Vector u = testing_util::random_vector(V.n_dofs(), rng);
  const Vector got = c.G.transpose_multiply(u);
  const auto& rule = quad_rule(6);
  for (int q = 0; q < P.n_dofs(); ++q) {
    Vector e = Vector::Zero(P.n_dofs());
    e[q] = 1.0;
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(m->n_triangles()); ++t) {
      const AffineMap map = AffineMap::of(m->corners(t));
      for (std::size_t i = 0; i < rule.points.size(); ++i) {
        const Vec2 r = rule.points[i];
        const Vec2 uv{V.value(as_span(u), t, r, 0), V.value(as_span(u), t, r, 1)};
        s += rule.weights[i] * map.det * dot(uv, P.gradient(as_span(e), t, r));
      }
    }
    EXPECT_NEAR(got[q], s, 1e-14);
  }
}

TEST(Load, ZeroConstantAndQuadrature) {
  auto m = testing_util::square(2);
  const FESpace V = build_space(m, 2, 2, true, false);
  const VectorFn zero = [](double, double, double) { return Vec2{}; };
  EXPECT_EQ(assemble_load(V, zero, 0.0, 0.1).norm(), 0.0);
  const std::function<Vec2(double, double)> g = [](double x, double y) { return Vec2{std::sin(3 * x) * y, 1.0 + x * y}; };
  const Vector want = load_by_quadrature(V, g);
  EXPECT_LT((assemble_load(V, g) - want).norm(), 1e-14);
  const VectorFn steady = [&](double, double x, double y) { return g(x, y); };
  EXPECT_LT((assemble_load(V, steady, 0.3, 0.4) - want).norm(), 1e-14);
}

TEST(Load, WindowStraddlingHorizon) {
  auto m = testing_util::square(2);
  const FESpace V = build_space(m, 2, 2, true, false);
  const VectorFn f = [](double t, double, double) { return Vec2{t, 0.0}; };
  const std::function<Vec2(double, double)> e1 = [](double, double) { return Vec2{1.0, 0.0}; };
  const Vector unit = assemble_load(V, e1);
  // (1/0.2) int_{0.9}^{1.0} t dt
  const double avg = 0.475;
  EXPECT_LT((assemble_load(V, f, 0.9, 1.1, 1.0) - avg * unit).norm(), 1e-14);
  EXPECT_LT((assemble_load(V, f, 0.9, 1.1) - 1.0 * unit).norm(), 1e-14);
  EXPECT_EQ(assemble_load(V, f, 1.1, 1.3, 1.0).norm(), 0.0);
  EXPECT_NEAR(time_averaged_norm_sq(*m, f, 0.9, 1.1, 1.0), avg * avg, 1e-14);
  EXPECT_THROW(assemble_load(V, f, 0.5, 0.5), Error);
}

TEST(Projection, IdempotentOrthogonalContractive) {
  auto m = testing_util::square(4);
  const FESpace V = build_space(m, 2, 2, true, false);
  const SparseMatrix M = assemble_mass(V);
  const std::function<Vec2(double, double)> g = [](double x, double y) {
    return Vec2{std::exp(x) * std::cos(2 * y), x * x - y};
  };
  const Vector c = project_L2_onto_Uh(V, g, M);
  const Vector orth = assemble_load(V, g) - M.multiply(c);
  EXPECT_LT(orth.norm(), 1e-12 * assemble_load(V, g).norm());
  EXPECT_LE(c.dot(M.multiply(c)), l2_norm_sq(*m, g));

  // projecting the FE function itself returns it
  const std::function<Vec2(double, double)> fe = [&](double x, double y) {
    for (int t = 0; t < static_cast<int>(m->n_triangles()); ++t) {
      const Vec2 r = AffineMap::of(m->corners(t)).to_reference({x, y});
      if (r.x >= -1e-12 && r.y >= -1e-12 && r.x + r.y <= 1 + 1e-12)
        return Vec2{V.value(as_span(c), t, r, 0), V.value(as_span(c), t, r, 1)};
    }
    return Vec2{};
  };
  const Vector again = project_L2_onto_Uh(V, fe, M);
  EXPECT_LT((again - c).norm(), 1e-11 * c.norm());
}

TEST(Operators, AssemblyDegree) {
  EXPECT_EQ(assembly_degree(1, 1), 2);
  EXPECT_EQ(assembly_degree(2, 1), 5);
  const auto d = testing_util::disc(2, 2);
  const auto& ops = d->ops();
  EXPECT_EQ(ops.M_u.rows(), d->n_u());
  EXPECT_EQ(ops.N_p.rows(), d->n_p());
  EXPECT_LT(ops.N_p.multiply(Vector::Ones(d->n_p())).norm(), 1e-13);
  EXPECT_NEAR(Vector::Ones(d->n_p()).dot(ops.M_p.multiply(Vector::Ones(d->n_p()))), 1.0, 1e-14);
}
