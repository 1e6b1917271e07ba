#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "kornlab/geometry.hpp"
#include "kornlab/spectral.hpp"

namespace kornlab {

/// Nodes per periodic parameter (n2 only for surfaces in R^3) and GLL nodes
/// through the thickness.
struct Resolution {
  int n1 = 64;
  int n2 = 0;
  int nt = 12;
};

/// Periodic tensor grid on the surface itself. The sphere uses midpoint
/// latitudes with Fejer weights; it supports quadrature but no
/// differentiation in phi.
class SurfaceGrid {
 public:
  SurfaceGrid(const Hypersurface& surface, int n1, int n2 = 0);

  const Hypersurface& surface() const { return surface_; }
  const TensorLayout& layout() const { return layout_; }
  int size() const { return layout_.size(); }
  int ambient_dim() const { return surface_.ambient_dim(); }
  int param_dim() const { return surface_.param_dim(); }
  const Params& params(int i) const { return params_[i]; }
  const SurfaceSample& sample(int i) const { return samples_[i]; }
  /// Quadrature weight including the area element.
  double weight(int i) const { return weights_[i]; }

 private:
  Hypersurface surface_;
  TensorLayout layout_;
  std::vector<Params> params_;
  std::vector<SurfaceSample> samples_;
  std::vector<double> weights_;
};

/// One node of the shell grid.
struct ShellNode {
  double s = 0.0;
  double t = 0.0;
  AmbientVec point;
  /// Inverse of the chart Jacobian; ambient grad = [d/dchart] * chart_inv.
  AmbientMat chart_inv;
  double jacobian = 0.0;  // det(Id + t Pi)
  double weight = 0.0;
};

/// Tensor grid on S^h in normal coordinates z = x(u) + t(u, s) n(u),
/// t = -g1^h + s (g1^h + g2^h). Node index = surface_index * nt + layer.
class ShellGrid {
 public:
  ShellGrid(const ShellDomain& shell, const Resolution& res);

  const ShellDomain& shell() const { return shell_; }
  const SurfaceGrid& base() const { return base_; }
  const TensorLayout& layout() const { return layout_; }
  const LobattoRule& thickness_rule() const { return rule_; }
  const Resolution& resolution() const { return res_; }
  int ambient_dim() const { return base_.ambient_dim(); }
  int size() const { return layout_.size(); }
  int nt() const { return res_.nt; }
  int surface_index(int node) const { return node / res_.nt; }
  int layer(int node) const { return node % res_.nt; }
  int node_index(int surface_index, int layer) const { return surface_index * res_.nt + layer; }

  const ShellNode& node(int i) const { return nodes_[i]; }
  const Thickness& thickness(int surface_index) const { return thickness_[surface_index]; }

  /// Node on the boundary layer of `side` above surface node i.
  int boundary_node(Side side, int i) const {
    return node_index(i, side == Side::Plus ? res_.nt - 1 : 0);
  }
  /// Columns: offset boundary normal n^h, then orthonormal tangents.
  const AmbientMat& boundary_frame(Side side, int i) const { return frames_[index(side)][i]; }
  /// Area weight of the offset boundary surface at surface node i.
  double boundary_weight(Side side, int i) const { return boundary_weights_[index(side)][i]; }

  double volume() const;
  void write_csv(std::ostream& out) const;

 private:
  static int index(Side side) { return side == Side::Plus ? 1 : 0; }

  ShellDomain shell_;
  Resolution res_;
  SurfaceGrid base_;
  LobattoRule rule_;
  TensorLayout layout_;
  std::vector<ShellNode> nodes_;
  std::vector<Thickness> thickness_;
  std::array<std::vector<AmbientMat>, 2> frames_;
  std::array<std::vector<double>, 2> boundary_weights_;
};

ShellGrid build_grid(const ShellDomain& shell, const Resolution& res);

/// Chart derivatives of an interleaved field (comps per node) along every
/// direction of `layout`: result[d] has the same layout as `field`.
std::vector<Eigen::VectorXd> chart_derivatives(const TensorLayout& layout,
                                               const Eigen::VectorXd& field, int comps);

/// Ambient gradient (row = component, column = direction) at every node of
/// a full ambient vector field.
std::vector<AmbientMat> ambient_gradient(const ShellGrid& grid, const Eigen::VectorXd& field);

/// Samples f(z) at every shell node into an interleaved field.
template <class F>
Eigen::VectorXd sample_ambient(const ShellGrid& grid, F&& f) {
  const int n = grid.ambient_dim();
  Eigen::VectorXd out(grid.size() * n);
  for (int i = 0; i < grid.size(); ++i) out.segment(i * n, n) = f(grid.node(i).point);
  return out;
}

}  // namespace kornlab
