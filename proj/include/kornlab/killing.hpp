#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kornlab/grid.hpp"

namespace kornlab {

/// Orthonormal tangent frames on a surface grid and their parameter
/// derivatives. Tangent fields are stored as frame coordinates y (n-1 per
/// node) so tangency holds by construction.
struct TangentFrames {
  std::vector<AmbientMat> frame;                // n x (n-1) per node
  std::vector<std::vector<AmbientMat>> dframe;  // [direction][node]

  Eigen::VectorXd to_ambient(const Eigen::VectorXd& coords) const;
  Eigen::VectorXd to_coords(const Eigen::VectorXd& ambient) const;
};

TangentFrames tangent_frames(const SurfaceGrid& grid);

/// Surface forms on tangent fields: mass int |v|^2, stiffness int |grad v|^2
/// (full ambient gradient) and sym int |D_tan v|^2.
struct SurfaceForms {
  SurfaceGrid grid;
  TangentFrames frames;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd sym;
};

SurfaceForms surface_forms(const Hypersurface& surface, int n1, int n2 = 0);

struct KillingPolicy {
  double relative_threshold = 1e-6;  // times the median pencil eigenvalue
  double gap = 100.0;
  int probe = 12;                    // eigenvalues inspected
};

/// Tangent fields on a surface grid, L2(S)-orthonormal, as ambient
/// components (n per node).
struct KillingBasis {
  std::vector<Eigen::VectorXd> fields;
  std::vector<double> eigenvalues;   // pencil eigenvalue of each member
  std::vector<double> spectrum;      // leading pencil eigenvalues inspected
  double threshold = 0.0;
  double gap = 0.0;                  // first rejected / last kept (or / threshold)
  double median = 0.0;

  int dim() const { return static_cast<int>(fields.size()); }
};

/// Near-kernel of the pencil (sym, mass + stiffness). Throws
/// AmbiguousKernelError when no spectral gap separates it.
KillingBasis killing_basis(const SurfaceForms& forms, const KillingPolicy& policy = {});
KillingBasis killing_basis(const Hypersurface& surface, int n1, int n2 = 0,
                           const KillingPolicy& policy = {});

/// Rigid generators Ax + b tangent to S (null space of their normal-flux Gram form).
KillingBasis rigid_tangent_basis(const SurfaceGrid& grid);

/// Subspace of span(basis) orthogonal pointwise to grad(g1 + g2).
KillingBasis restrict_profile(const SurfaceGrid& grid, const KillingBasis& basis,
                              const ThicknessProfile& profile);

/// L2(S) inner product of ambient tangent fields.
double surface_inner(const SurfaceGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Surface gradient of an ambient field on a differentiable grid:
/// sum over parameters of d_a u (x) x^a.
std::vector<AmbientMat> surface_gradient(const SurfaceGrid& grid, const Eigen::VectorXd& field);

struct BochnerResult {
  double lhs = 0.0;   // int |grad u|^2
  double rhs = 0.0;   // int (tr Pi) Pi u . u
  double relerr = 0.0;
  bool has_covariant = false;
  double covariant_lhs = 0.0;  // int |P grad u|^2
  double covariant_rhs = 0.0;  // int det Pi |u|^2
  double covariant_relerr = 0.0;
};

/// Both sides of the Killing-field curvature identity for a near-Killing
/// field sampled on a differentiable grid.
BochnerResult bochner_check(const SurfaceGrid& grid, const Eigen::VectorXd& field);
/// Same identity for the tangent rigid field Ax + b using its exact
/// gradient A P; works on quadrature-only grids.
BochnerResult bochner_check(const SurfaceGrid& grid, const AmbientMat& a, const AmbientVec& b);

}  // namespace kornlab
