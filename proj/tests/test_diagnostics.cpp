#include "helpers.hpp"
#include "oracles.hpp"

#include "projflow/diagnostics.hpp"
#include "projflow/error.hpp"
#include "projflow/mms.hpp"
#include "projflow/scheme.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace projflow;

namespace {

SchemeConfig forced_config() {
  SchemeConfig c;
  c.mesh_n = 4;
  c.dt = 0.02;
  c.T = 0.2;
  c.mu = 0.5;
  apply_case(c, stream_vortex_case(c.mu));
  return c;
}

const RunResult& forced_run() {
  static const RunResult r = run(forced_config());
  return r;
}

}  // namespace

TEST(Identities, ResidualsVanishOnSchemeStates) {
  SchemeConfig c = forced_config();
  ProjectionScheme sch(c);
  const State s0 = sch.init_states();
  const State s1 = sch.first_step_backward_euler(s0);
  const State s2 = sch.bdf2_step(s1);
  const auto& d = sch.disc();
  EXPECT_LT(init_identity_residual(d, s0, sch.dt()), 1e-12);
  EXPECT_LT(first_step_identity_residual(d, s0, s1, sch.load(1), sch.dt(), c.mu), 1e-10);
  EXPECT_LT(step_identity_residual(d, s1, s2, sch.load(2), sch.dt(), c.mu), 1e-10);
  EXPECT_LT(pythagoras_residual(d, s2.utilde_m, s2.u_m), 1e-12);
  EXPECT_LT(weak_divergence_residual(d, s2.u_m), 1e-10);

  // perturbed fields break the balance
  State bad = s2;
  bad.p_m *= 1.1;
  EXPECT_GT(step_identity_residual(d, s1, bad, sch.load(2), sch.dt(), c.mu), 1e-5);
  State bad_u = s2;
  bad_u.utilde_m *= 1.0 + 1e-3;
  EXPECT_GT(step_identity_residual(d, s1, bad_u, sch.load(2), sch.dt(), c.mu), 1e-5);
  State bad1 = s1;
  bad1.p_m *= 1.1;
  EXPECT_GT(first_step_identity_residual(d, s0, bad1, sch.load(1), sch.dt(), c.mu), 1e-5);
}

TEST(Identities, ZeroStatesGiveZero) {
  const auto d = testing_util::disc(2, 2);
  const YhElement z = YhElement::zero(d->n_u(), d->n_p());
  EXPECT_EQ(pythagoras_residual(*d, Vector::Zero(d->n_u()), z), 0.0);
  EXPECT_EQ(weak_divergence_residual(*d, z), 0.0);
  const SparseMatrix B = assemble_convection(d->velocity(), Vector::Zero(d->n_u()));
  EXPECT_EQ(skew_residual(B, Vector::Zero(d->n_u()), Vector::Ones(d->n_u()), d->ops().M_u), 0.0);
}

TEST(Identities, PythagorasDetectsNonOrthogonalSplit) {
  const auto d = testing_util::disc(3, 2);
  std::mt19937_64 rng(41);
  const Vector ut = testing_util::random_vector(d->n_u(), rng);
  const YhElement u = YhElement::from_velocity(0.5 * ut, d->n_p());
  // ||ut||^2 - ||ut/2||^2 - ||ut/2||^2 = ||ut||^2 / 2
  EXPECT_NEAR(pythagoras_residual(*d, ut, u), 0.5, 1e-12);
}

TEST(Gronwall, NoGrowthWhenNuIsZero) {
  const std::vector<double> b{1.0, 0.5, 2.0, 0.0};
  const auto out = discrete_gronwall_bound(b, 0.0, 0.1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_DOUBLE_EQ(out[i], b[i]);
}

TEST(Gronwall, ConstantDataClosedForm) {
  const double nu = 2.0, dt = 0.05, q = 1.0 - nu * dt;
  const std::vector<double> b(30, 1.0);
  const auto out = discrete_gronwall_bound(b, nu, dt);
  const auto mono = discrete_gronwall_monotone_bound(b, nu, dt);
  for (std::size_t n = 0; n < b.size(); ++n) {
    // 1 + nu dt/q sum_{j=0}^{n} q^{-(n-j)} = q^{-(n+1)}
    EXPECT_NEAR(out[n], std::pow(q, -static_cast<double>(n + 1)), 1e-12 * out[n]);
    EXPECT_NEAR(mono[n], out[n], 1e-12 * out[n]);
  }
}

TEST(Gronwall, WorstCaseRecursionIsTight) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int len = 1 + static_cast<int>(u(rng) * 40);
    const double nu = 0.1 + 4.0 * u(rng);
    const double dt = 0.9 * u(rng) / nu + 1e-6;
    std::vector<double> b(len), slack(len), zero(len, 0.0);
    for (int i = 0; i < len; ++i) {
      b[i] = 10.0 * u(rng);
      slack[i] = b[i] * u(rng);
    }
    const auto bound = discrete_gronwall_bound(b, nu, dt);
    const auto tight = oracle::gronwall_recursion(b, zero, nu, dt);
    const auto loose = oracle::gronwall_recursion(b, slack, nu, dt);
    for (int i = 0; i < len; ++i) {
      EXPECT_NEAR(bound[i], tight[i], 1e-10 * std::max(1.0, tight[i])) << "trial " << trial;
      EXPECT_LE(loose[i], bound[i] * (1 + 1e-12));
    }
  }
}

TEST(Gronwall, MonotoneClosedFormDominates) {
  const std::vector<double> b{0.1, 0.2, 0.2, 0.5, 0.9, 1.0};
  const auto out = discrete_gronwall_bound(b, 1.5, 0.1);
  const auto mono = discrete_gronwall_monotone_bound(b, 1.5, 0.1);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_LE(out[i], mono[i] * (1 + 1e-14));
}

TEST(Gronwall, RejectsInvalidInput) {
  const std::vector<double> b{1.0};
  EXPECT_THROW(discrete_gronwall_bound(b, 2.0, 0.5), Error);
  EXPECT_THROW(discrete_gronwall_bound(b, 2.0, 0.6), Error);
  const std::vector<double> neg{-1.0};
  EXPECT_THROW(discrete_gronwall_bound(neg, 1.0, 0.1), Error);
  EXPECT_THROW(discrete_gronwall_monotone_bound(b, 1.0, 1.0), Error);
}

TEST(EnergyCheck, HoldsOnForcedRun) {
  const RunResult& r = forced_run();
  const EnergyReport& e = r.energy;
  EXPECT_TRUE(e.holds) << (e.violations.empty() ? "" : e.violations.front());
  EXPECT_TRUE(e.final_form_applicable);
  EXPECT_FALSE(e.forcing_free);
  EXPECT_EQ(e.rows.size(), static_cast<std::size_t>(r.grid.steps));
  EXPECT_DOUBLE_EQ(e.constant, 10.0 + 14.0 * 0.02);
  EXPECT_GT(e.max_ratio, 0.0);
  EXPECT_LE(e.max_ratio, 1.0);
  for (const auto& row : e.rows) {
    EXPECT_LE(row.lhs_traced, row.gronwall_bound);
    EXPECT_LE(row.utilde_norm_sq, row.rhs);
  }
}

TEST(EnergyCheck, FlagsInflatedLedger) {
  const RunResult& r = forced_run();
  EnergyLedger bad = r.ledger;
  bad[3].E_h = 1e3 * r.energy.rows.back().rhs;
  const EnergyReport e = energy_inequality_check(bad, r.u0_norm_sq, r.f_norms_sq, r.grid.dt, 0.5);
  EXPECT_FALSE(e.holds);
  ASSERT_FALSE(e.violations.empty());
  EXPECT_NE(e.violations.front().find("M = 3"), std::string::npos);
}

TEST(EnergyCheck, FlagsGrowthWithoutForcing) {
  EnergyLedger l(4);
  for (int m = 0; m < 4; ++m) l[m].step = m;
  l[1].E_h = 1.0;
  l[2].E_h = 0.9;
  l[3].E_h = 0.95;
  const std::vector<double> f(3, 0.0);
  const EnergyReport e = energy_inequality_check(l, 1.0, f, 0.01, 1.0);
  EXPECT_TRUE(e.forcing_free);
  EXPECT_FALSE(e.energy_non_increasing);
  EXPECT_FALSE(e.holds);
}

TEST(EnergyCheck, RejectsGappedLedger) {
  EnergyLedger l(3);
  l[0].step = 0;
  l[1].step = 2;
  l[2].step = 4;
  const std::vector<double> f(2, 0.0);
  EXPECT_THROW(energy_inequality_check(l, 1.0, f, 0.1, 1.0), Error);
}

TEST(Interpolants, ZeroTrajectoryAndBound) {
  SchemeConfig z;
  z.mesh_n = 2;
  z.dt = 0.1;
  z.T = 0.3;
  const RunResult rz = run(z);
  const InterpolantNorms n0 = interpolant_difference_norms(rz.trajectory, *rz.disc, rz.grid.dt);
  EXPECT_EQ(n0.u_minus_utilde + n0.u_minus_ubar + n0.ubar_minus_uhat, 0.0);

  const RunResult& r = forced_run();
  const InterpolantNorms n = interpolant_difference_norms(r.trajectory, *r.disc, r.grid.dt);
  EXPECT_GT(n.u_minus_utilde, 0.0);
  EXPECT_LE(n.u_minus_utilde, splitting_error_bound(r.energy, r.grid.dt));
  // dt sum of the ledger column
  double s = 0.0;
  for (std::size_t m = 1; m < r.ledger.size(); ++m) s += r.ledger[m].split_err_sq;
  EXPECT_NEAR(n.u_minus_utilde, r.grid.dt * s, 1e-12 * n.u_minus_utilde);
}

TEST(Interpolants, ThinnedTrajectoryRejected) {
  SchemeConfig c = forced_config();
  c.store_every = 2;
  const RunResult r = run(c);
  EXPECT_THROW(interpolant_difference_norms(r.trajectory, *r.disc, r.grid.dt), Error);
  EXPECT_THROW(time_modulus(r.trajectory, *r.disc, r.grid.dt, 0.01), Error);
}

TEST(TimeModulus, AgreesWithMidpointOracle) {
  const RunResult& r = forced_run();
  const double dt = r.grid.dt;
  const auto norm = [&](const Vector& v) { return r.disc->velocity_norm_sq(v); };
  for (double frac : {0.3, 0.5, 1.0, 2.0, 3.7}) {
    const double tau = frac * dt;
    const double got = time_modulus(r.trajectory, *r.disc, dt, tau);
    const double ref = oracle::time_modulus_midpoint(r.trajectory, norm, dt, tau, 10);
    EXPECT_NEAR(got, ref, 1e-10 * ref) << "tau = " << frac << " dt";
  }
  EXPECT_EQ(time_modulus(r.trajectory, *r.disc, dt, 0.0), 0.0);
  EXPECT_THROW(time_modulus(r.trajectory, *r.disc, dt, r.grid.steps * dt), Error);
  EXPECT_THROW(time_modulus(r.trajectory, *r.disc, dt, -dt), Error);
}

TEST(TimeModulus, ConstantInTimeIsZero) {
  SchemeConfig z;
  z.mesh_n = 2;
  z.dt = 0.1;
  z.T = 0.5;
  const RunResult r = run(z);
  EXPECT_EQ(time_modulus(r.trajectory, *r.disc, 0.1, 0.15), 0.0);
}

TEST(Ledger, RowColumnsConsistent) {
  const RunResult& r = forced_run();
  for (std::size_t m = 0; m < r.ledger.size(); ++m) {
    const LedgerRow& row = r.ledger[m];
    EXPECT_EQ(row.step, static_cast<int>(m));
    EXPECT_NEAR(row.E_h, row.norm_u_sq + row.norm_2u_minus_um1_sq + row.dt2_gradp_sq, 1e-14 * std::max(1.0, row.E_h));
    EXPECT_LT(row.residual_pythagoras, 1e-10);
    EXPECT_NEAR(row.pressure_mean, 0.0, 1e-12);
    if (m < 2) EXPECT_EQ(row.second_diff_sq, 0.0);
  }
  EXPECT_GT(r.ledger[1].first_jump_sq, 0.0);
}
