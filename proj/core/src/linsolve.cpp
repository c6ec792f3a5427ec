#include "projflow/linsolve.hpp"

#include "projflow/error.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <vector>

namespace projflow {

double relative_residual(const SparseMatrix& A, const Vector& x, const Vector& b) {
  const double r = (b - A.multiply(x)).norm();
  const double nb = b.norm();
  return nb > 0.0 ? r / nb : r;
}

namespace {

void remove_constant(Vector& v) { v.array() -= v.mean(); }

}  // namespace

Vector solve_spd(const SparseMatrix& A, const Vector& rhs_in, const SpdOptions& opts, SolveStats* stats) {
  const int n = A.rows();
  if (A.cols() != n || rhs_in.size() != n) throw Error("solve_spd: dimension mismatch");
  Vector b = rhs_in;
  if (opts.zero_mean && n > 0) remove_constant(b);

  Vector x = Vector::Zero(n);
  const double nb = b.norm();
  if (n == 0 || nb == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }

  Vector inv_diag = A.diagonal();
  for (int i = 0; i < n; ++i) {
    if (!(inv_diag[i] > 0.0)) throw Error("solve_spd: non-positive diagonal entry " + std::to_string(i));
    inv_diag[i] = 1.0 / inv_diag[i];
  }

  const int cap = opts.max_iterations > 0 ? opts.max_iterations : 10 * n;
  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  if (opts.zero_mean) remove_constant(z);
  Vector p = z;
  double rz = r.dot(z);
  int it = 0;
  double res = 1.0;
  while (it < cap) {
    const Vector ap = A.multiply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    ++it;
    res = r.norm() / nb;
    if (res <= opts.tol) {
      // Confirm against the true residual; the recursive one drifts.
      r = b - A.multiply(x);
      if (opts.zero_mean) remove_constant(r);
      res = r.norm() / nb;
      if (res <= opts.tol) break;
    }
    z = inv_diag.cwiseProduct(r);
    if (opts.zero_mean) remove_constant(z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }

  if (opts.zero_mean) {
    if (opts.mean_mass) {
      const Vector ones = Vector::Ones(n);
      const Vector m1 = opts.mean_mass->multiply(ones);
      x.array() -= m1.dot(x) / m1.sum();
    } else {
      remove_constant(x);
    }
  }
  const double final_res = (b - A.multiply(x)).norm() / nb;
  if (stats) *stats = {it, final_res};
  if (!(final_res <= opts.tol)) {
    throw SolverError("conjugate gradients did not converge in " + std::to_string(it) + " iterations",
                      final_res);
  }
  return x;
}

struct MomentumSolver::Impl {
  using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>> lu;
  std::vector<int> pattern_row_ptr;
  std::vector<int> pattern_col_idx;
  bool analysed = false;

  static EigenSparse to_eigen(const SparseMatrix& A) {
    // CSR of A is CSC of A^T; transpose once to get column-major A.
    Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> row_major(
        A.rows(), A.cols(), static_cast<int>(A.nnz()), A.row_ptr().data(), A.col_idx().data(),
        A.values().data());
    return EigenSparse(row_major);
  }
};

MomentumSolver::MomentumSolver() : impl_(std::make_unique<Impl>()) {}
MomentumSolver::~MomentumSolver() = default;
MomentumSolver::MomentumSolver(MomentumSolver&&) noexcept = default;
MomentumSolver& MomentumSolver::operator=(MomentumSolver&&) noexcept = default;

Vector MomentumSolver::solve(const SparseMatrix& A, const Vector& rhs, double tol, SolveStats* stats) {
  const int n = A.rows();
  if (A.cols() != n || rhs.size() != n) throw Error("solve_momentum: dimension mismatch");
  if (n == 0) {
    if (stats) *stats = {0, 0.0};
    return Vector(0);
  }
  auto mat = Impl::to_eigen(A);
  if (!impl_->analysed || impl_->pattern_row_ptr != A.row_ptr() || impl_->pattern_col_idx != A.col_idx()) {
    impl_->lu.analyzePattern(mat);
    impl_->pattern_row_ptr = A.row_ptr();
    impl_->pattern_col_idx = A.col_idx();
    impl_->analysed = true;
  }
  impl_->lu.factorize(mat);
  if (impl_->lu.info() != Eigen::Success) {
    impl_->analysed = false;
    throw SolverError("sparse LU factorization failed: " + impl_->lu.lastErrorMessage(),
                      std::numeric_limits<double>::quiet_NaN());
  }
  Vector x = impl_->lu.solve(rhs);
  double res = relative_residual(A, x, rhs);
  // A couple of refinement sweeps absorb pivot growth.
  for (int sweep = 0; sweep < 3 && res > tol; ++sweep) {
    const Vector r = rhs - A.multiply(x);
    x += impl_->lu.solve(r);
    res = relative_residual(A, x, rhs);
  }
  if (stats) *stats = {1, res};
  if (!std::isfinite(res) || res > tol) throw SolverError("momentum solve missed its tolerance", res);
  return x;
}

Vector solve_momentum(const SparseMatrix& A, const Vector& rhs, double tol, SolveStats* stats) {
  MomentumSolver solver;
  return solver.solve(A, rhs, tol, stats);
}

}  // namespace projflow
