#pragma once

#include <limits>

#include <Eigen/Dense>

namespace kornlab {

struct EigenResult {
  Eigen::VectorXd eigenvalues;  // k smallest, ascending
  Eigen::MatrixXd vectors;      // B-normalized columns
  Eigen::VectorXd residuals;    // |A v - lambda B v| / |B v|
  Eigen::VectorXd spectrum;     // every eigenvalue of the pencil, ascending
  double median = 0.0;
  bool degenerate = false;
  double constant = std::numeric_limits<double>::infinity();

  double max_residual() const { return residuals.size() ? residuals.maxCoeff() : 0.0; }
};

/// k smallest eigenpairs of A v = lambda B v via Cholesky of B, reduction to
/// standard form, tridiagonalization, bisection and inverse iteration.
/// Throws FormError when B is not positive definite.
EigenResult smallest_eigenpairs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int k);

/// Relative residual of one pair.
double pair_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double lambda,
                     const Eigen::VectorXd& v);

}  // namespace kornlab
