#include "kornlab/spectral.hpp"

#include <cmath>
#include <numbers>

#include "kornlab/errors.hpp"

namespace kornlab {

Eigen::MatrixXd fourier_diff_matrix(int n) {
  if (n < 2) throw ResolutionError("periodic direction needs at least 2 nodes");
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const bool even = n % 2 == 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double half_gap = (i - j) * std::numbers::pi / n;
      const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = even ? 0.5 * sign / std::tan(half_gap) : 0.5 * sign / std::sin(half_gap);
    }
  }
  return d;
}

LobattoRule lobatto_rule(int n) {
  if (n < 2) throw ResolutionError("Lobatto rule needs at least 2 points");
  const int degree = n - 1;
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) x(j) = -std::cos(std::numbers::pi * j / degree);
  Eigen::MatrixXd p(n, n);
  for (int iter = 0; iter < 100; ++iter) {
    p.col(0).setOnes();
    if (degree >= 1) p.col(1) = x;
    for (int k = 2; k <= degree; ++k) {
      p.col(k) = ((2.0 * k - 1.0) * x.cwiseProduct(p.col(k - 1)) - (k - 1.0) * p.col(k - 2)) / k;
    }
    const Eigen::VectorXd step =
        (x.cwiseProduct(p.col(degree)) - p.col(degree - 1)).cwiseQuotient(n * p.col(degree));
    x -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-15) break;
  }
  x(0) = -1.0;
  x(n - 1) = 1.0;
  p.col(0).setOnes();
  if (degree >= 1) p.col(1) = x;
  for (int k = 2; k <= degree; ++k)
    p.col(k) = ((2.0 * k - 1.0) * x.cwiseProduct(p.col(k - 1)) - (k - 1.0) * p.col(k - 2)) / k;

  LobattoRule rule;
  rule.nodes = 0.5 * (x.array() + 1.0);
  rule.weights = (1.0 / (degree * (degree + 1.0))) * p.col(degree).array().square().inverse();

  // Barycentric differentiation on [-1, 1], then scaled to [0, 1].
  Eigen::VectorXd bary = Eigen::VectorXd::Ones(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) bary(j) /= (x(j) - x(k));
  rule.diff = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      rule.diff(i, j) = 2.0 * (bary(j) / bary(i)) / (x(i) - x(j));
      diag -= rule.diff(i, j);
    }
    rule.diff(i, i) = diag;
  }
  return rule;
}

TensorLayout::TensorLayout(std::vector<int> extents, std::vector<Eigen::MatrixXd> diff,
                           std::vector<bool> periodic)
    : extents_(std::move(extents)), diff_(std::move(diff)), periodic_(std::move(periodic)) {
  strides_.assign(extents_.size(), 1);
  for (int d = dims() - 2; d >= 0; --d) strides_[d] = strides_[d + 1] * extents_[d + 1];
  size_ = 1;
  for (int e : extents_) size_ *= e;
}

Eigen::VectorXd TensorLayout::differentiate(const Eigen::VectorXd& f, int comps, int d) const {
  const Eigen::MatrixXd& op = diff_[d];
  if (op.size() == 0) throw UnsupportedSurfaceError("direction is not differentiable");
  const int n = extents_[d];
  const int st = strides_[d];
  Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
  Eigen::MatrixXd line(n, comps);
  for (int node = 0; node < size_; ++node) {
    if (coord(node, d) != 0) continue;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < comps; ++c) line(i, c) = f((node + i * st) * comps + c);
    const Eigen::MatrixXd dl = op * line;
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < comps; ++c) out((node + i * st) * comps + c) = dl(i, c);
  }
  return out;
}

namespace {

// Orthonormal real Fourier modes |k| <= n/3 sampled on n points (n x kept).
Eigen::MatrixXd low_modes(int n) {
  const int top = n / 3;
  Eigen::MatrixXd b(n, 2 * top + 1);
  for (int i = 0; i < n; ++i) {
    b(i, 0) = 1.0 / std::sqrt(n);
    for (int k = 1; k <= top; ++k) {
      const double arg = 2.0 * std::numbers::pi * k * i / n;
      b(i, 2 * k - 1) = std::sqrt(2.0 / n) * std::cos(arg);
      b(i, 2 * k) = std::sqrt(2.0 / n) * std::sin(arg);
    }
  }
  return b;
}

}  // namespace

Eigen::SparseMatrix<double> dealias_basis(const TensorLayout& layout, int comps) {
  const int dims = layout.dims();
  std::vector<Eigen::MatrixXd> factor(dims);
  std::vector<int> kept(dims);
  int cols = 1;
  for (int d = 0; d < dims; ++d) {
    factor[d] = layout.periodic(d) ? low_modes(layout.extent(d))
                                   : Eigen::MatrixXd::Identity(layout.extent(d), layout.extent(d));
    kept[d] = static_cast<int>(factor[d].cols());
    cols *= kept[d];
  }
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> mode(dims);
  for (int col = 0; col < cols; ++col) {
    for (int d = dims - 1, rest = col; d >= 0; --d) {
      mode[d] = rest % kept[d];
      rest /= kept[d];
    }
    for (int node = 0; node < layout.size(); ++node) {
      double v = 1.0;
      for (int d = 0; d < dims && v != 0.0; ++d) v *= factor[d](layout.coord(node, d), mode[d]);
      if (v == 0.0) continue;
      for (int c = 0; c < comps; ++c) triplets.emplace_back(node * comps + c, col * comps + c, v);
    }
  }
  Eigen::SparseMatrix<double> basis(layout.size() * comps, cols * comps);
  basis.setFromTriplets(triplets.begin(), triplets.end());
  return basis;
}

}  // namespace kornlab
