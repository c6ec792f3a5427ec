#include "projflow/assembly.hpp"
#include "projflow/discretization.hpp"
#include "projflow/linsolve.hpp"
#include "projflow/mms.hpp"
#include "projflow/scheme.hpp"

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

using namespace projflow;

namespace {

std::shared_ptr<const Discretization> make_disc(int n, int k) {
  return std::make_shared<const Discretization>(std::make_shared<const Mesh>(generate_structured_unit_square(n)), k, 1);
}

Vector random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

void BM_OperatorAssembly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mesh = std::make_shared<const Mesh>(generate_structured_unit_square(n));
  const FESpace V(mesh, 2, 2, true, false);
  const FESpace P(mesh, 1, 1, false, true);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_operators(V, P));
}
BENCHMARK(BM_OperatorAssembly)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ConvectionAssembly(benchmark::State& state) {
  const auto d = make_disc(static_cast<int>(state.range(0)), 2);
  const Vector w = random_vector(d->n_u(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_convection(d->velocity(), w));
}
BENCHMARK(BM_ConvectionAssembly)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_MomentumSolve(benchmark::State& state) {
  const auto d = make_disc(static_cast<int>(state.range(0)), 2);
  const auto& ops = d->ops();
  const SparseMatrix K = SparseMatrix::linear_combination(
      1.0, SparseMatrix::linear_combination(100.0, ops.M_u, 1.0, assemble_convection(d->velocity(), random_vector(d->n_u(), 2))),
      1.0, ops.A_u);
  const Vector b = random_vector(d->n_u(), 3);
  MomentumSolver solver;
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(K, b));
}
BENCHMARK(BM_MomentumSolve)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_PressurePoisson(benchmark::State& state) {
  const auto d = make_disc(static_cast<int>(state.range(0)), 2);
  Vector b = random_vector(d->n_p(), 4);
  b.array() -= b.mean();
  SpdOptions o;
  o.zero_mean = true;
  o.mean_mass = &d->ops().M_p;
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(d->ops().N_p, b, o));
}
BENCHMARK(BM_PressurePoisson)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Bdf2Step(benchmark::State& state) {
  SchemeConfig c;
  c.mesh_n = static_cast<int>(state.range(0));
  c.dt = 0.01;
  c.T = 1.0;
  c.enforce_gates = false;
  apply_case(c, stream_vortex_case(c.mu));
  ProjectionScheme sch(c);
  const State s1 = sch.first_step_backward_euler(sch.init_states());
  for (auto _ : state) benchmark::DoNotOptimize(sch.bdf2_step(s1));
}
BENCHMARK(BM_Bdf2Step)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
