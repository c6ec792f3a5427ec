#pragma once

#include "projflow/sparse.hpp"
#include "projflow/types.hpp"

#include <memory>

namespace projflow {

struct SpdOptions {
  double tol = 1e-12;  // relative residual ||b - Ax|| / ||b||
  /// The operator's kernel is the constant coefficient vector; the rhs is
  /// projected onto its complement before solving.
  bool zero_mean = false;
  /// When set with zero_mean, the returned function has zero integral
  /// (mean taken in this mass matrix); otherwise the coefficient mean is removed.
  const SparseMatrix* mean_mass = nullptr;
  int max_iterations = 0;  // 0: 10 * dim
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // recomputed after the solve
};

/// Jacobi-preconditioned conjugate gradients.
Vector solve_spd(const SparseMatrix& A, const Vector& rhs, const SpdOptions& opts = {},
                 SolveStats* stats = nullptr);

/// Direct sparse LU for the nonsymmetric momentum operator. The sparsity
/// pattern is analysed once and reused while it stays the same.
class MomentumSolver {
public:
  MomentumSolver();
  ~MomentumSolver();
  MomentumSolver(MomentumSolver&&) noexcept;
  MomentumSolver& operator=(MomentumSolver&&) noexcept;

  Vector solve(const SparseMatrix& A, const Vector& rhs, double tol = 1e-12, SolveStats* stats = nullptr);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot momentum solve.
Vector solve_momentum(const SparseMatrix& A, const Vector& rhs, double tol = 1e-12,
                      SolveStats* stats = nullptr);

/// ||b - Ax|| / ||b||, or ||Ax|| when b = 0.
double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b);

}  // namespace projflow
