#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kornlab {

/// Differentiation matrix for trigonometric interpolation on n equispaced
/// nodes of [0, 2 pi). For even n the Nyquist mode is mapped to zero.
Eigen::MatrixXd fourier_diff_matrix(int n);

/// Gauss-Lobatto-Legendre rule with n >= 2 points mapped to [0, 1].
struct LobattoRule {
  Eigen::VectorXd nodes;    // increasing, nodes(0) = 0, nodes(n-1) = 1
  Eigen::VectorXd weights;  // sum to 1
  Eigen::MatrixXd diff;     // Lagrange differentiation matrix on the nodes
};
LobattoRule lobatto_rule(int n);

/// Index arithmetic and per-direction differentiation on a tensor grid.
/// Directions are ordered slowest first; the last direction is contiguous.
class TensorLayout {
 public:
  TensorLayout() = default;
  TensorLayout(std::vector<int> extents, std::vector<Eigen::MatrixXd> diff,
               std::vector<bool> periodic);

  int dims() const { return static_cast<int>(extents_.size()); }
  int extent(int d) const { return extents_[d]; }
  int stride(int d) const { return strides_[d]; }
  int size() const { return size_; }
  bool periodic(int d) const { return periodic_[d]; }
  const Eigen::MatrixXd& diff(int d) const { return diff_[d]; }
  int coord(int node, int d) const { return (node / strides_[d]) % extents_[d]; }

  /// Derivative along direction d of a field with `comps` interleaved
  /// components per node (index node * comps + c).
  Eigen::VectorXd differentiate(const Eigen::VectorXd& f, int comps, int d) const;

 private:
  std::vector<int> extents_;
  std::vector<int> strides_;
  std::vector<Eigen::MatrixXd> diff_;
  std::vector<bool> periodic_;
  int size_ = 0;
};

/// Orthonormal basis (as columns) of the fields whose Fourier content along
/// every periodic line stays at or below n/3 (2/3 rule). Products of two
/// such fields stay below the aliasing limit of the n-point rule, so the
/// quadrature forms are exact Galerkin forms up to the geometry's own
/// spectral tail. Non-periodic directions are kept whole.
Eigen::SparseMatrix<double> dealias_basis(const TensorLayout& layout, int comps);

}  // namespace kornlab
