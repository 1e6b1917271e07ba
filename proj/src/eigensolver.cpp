#include "kornlab/eigensolver.hpp"

#include <algorithm>
#include <vector>

#include <lapacke.h>

#include "kornlab/errors.hpp"

namespace kornlab {

double pair_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda,
                     const Eigen::VectorXd& v) {
  const Eigen::VectorXd bv = b * v;
  return (a * v - lambda * bv).norm() / bv.norm();
}

EigenResult smallest_eigenpairs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int k) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != n || b.rows() != n || b.cols() != n)
    throw DimensionError("pencil matrices must be square and of equal size");
  if (n == 0) throw DimensionError("empty pencil");
  k = std::clamp(k, 1, static_cast<int>(n));

  Eigen::MatrixXd chol = b;
  if (LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, chol.data(), n) != 0)
    throw FormError("mass form of the pencil is not positive definite");

  Eigen::MatrixXd c = a;
  if (LAPACKE_dsygst(LAPACK_COL_MAJOR, 1, 'L', n, c.data(), n, chol.data(), n) != 0)
    throw SolverError("reduction to standard form failed", 0.0);

  std::vector<double> diag(n), off(std::max<lapack_int>(n - 1, 1)), tau(std::max<lapack_int>(n - 1, 1));
  if (LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, c.data(), n, diag.data(), off.data(), tau.data()) != 0)
    throw SolverError("tridiagonalization failed", 0.0);

  EigenResult r;
  {
    std::vector<double> d2 = diag, e2 = off;
    if (LAPACKE_dsterf(n, d2.data(), e2.data()) != 0)
      throw SolverError("tridiagonal eigenvalue iteration did not converge", 0.0);
    r.spectrum = Eigen::Map<Eigen::VectorXd>(d2.data(), n);
    std::sort(r.spectrum.data(), r.spectrum.data() + n);
    const Eigen::Index mid = n / 2;
    r.median = n % 2 ? r.spectrum(mid) : 0.5 * (r.spectrum(mid - 1) + r.spectrum(mid));
  }

  lapack_int found = 0, nsplit = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  if (LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, 1, k, 0.0, diag.data(), off.data(), &found, &nsplit,
                     w.data(), iblock.data(), isplit.data()) != 0 ||
      found != k)
    throw SolverError("bisection did not isolate the requested eigenvalues", 0.0);

  Eigen::MatrixXd z(n, k);
  std::vector<lapack_int> ifail(k);
  if (LAPACKE_dstein(LAPACK_COL_MAJOR, n, diag.data(), off.data(), k, w.data(), iblock.data(),
                     isplit.data(), z.data(), n, ifail.data()) != 0)
    throw SolverError("inverse iteration did not converge", 0.0);
  if (LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, k, c.data(), n, tau.data(), z.data(), n) != 0)
    throw SolverError("back-transformation failed", 0.0);

  r.eigenvalues = Eigen::Map<Eigen::VectorXd>(w.data(), k);
  r.vectors = chol.triangularView<Eigen::Lower>().transpose().solve(z);
  r.residuals.resize(k);
  for (int j = 0; j < k; ++j) r.residuals(j) = pair_residual(a, b, r.eigenvalues(j), r.vectors.col(j));
  return r;
}

}  // namespace kornlab
