#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kornlab/grid.hpp"

namespace kornlab {

enum class Tangency { None, Plus, Minus, Both };
/// Fields the admissible space is M-orthogonal to: nothing, rigid motions
/// tangent to the constrained boundary, trivial extensions of I(S), or
/// trivial extensions of I_{g1,g2}(S).
enum class Orthogonality { None, Rigid, Killing, ProfileKilling };

struct ConstraintSpec {
  Tangency tangency = Tangency::Both;
  Orthogonality orthogonality = Orthogonality::None;
  /// Cone angle parameter; only alpha = 0 (exact orthogonality) is enforced.
  double alpha = 0.0;

  void validate() const;
};

Tangency parse_tangency(const std::string& s);
Orthogonality parse_orthogonality(const std::string& s);
std::string to_string(Tangency t);
std::string to_string(Orthogonality o);

bool constrains(Tangency t, Side side);

/// Linear subspace of a nodal field space: optional per-node frame
/// elimination followed by linear equality constraints C u = 0.
class ReducedSpace {
 public:
  /// `embedding` has orthonormal columns (full x m); rows of `constraints`
  /// act on full fields.
  ReducedSpace(Eigen::SparseMatrix<double> embedding, const Eigen::MatrixXd& constraints);

  int full_dim() const { return static_cast<int>(embedding_.rows()); }
  int frame_dim() const { return static_cast<int>(embedding_.cols()); }
  int dim() const { return frame_dim() - rank_; }
  int constraint_rows() const { return rows_; }
  int constraint_rank() const { return rank_; }

  /// Restriction of a full symmetric form to the reduced coordinates.
  Eigen::MatrixXd reduce(const Eigen::MatrixXd& form) const;
  Eigen::VectorXd embed(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd embed(const Eigen::MatrixXd& y) const;
  /// Reduced coordinates of a full field (exact when the field lies in the space).
  Eigen::VectorXd coordinates(const Eigen::VectorXd& u) const;

 private:
  Eigen::MatrixXd apply_q(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd apply_qt(const Eigen::MatrixXd& x) const;

  Eigen::SparseMatrix<double> embedding_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
  int rows_ = 0;
  int rank_ = 0;
};

/// Identity embedding of `full` unknowns.
Eigen::SparseMatrix<double> identity_embedding(int full);

/// Embedding that keeps only the tangential frame components at
/// boundary nodes on the constrained sides.
Eigen::SparseMatrix<double> tangency_embedding(const ShellGrid& grid, Tangency tangency);

/// Rows (M f)^T for each field f; throws DimensionError on length mismatch.
Eigen::MatrixXd orthogonality_rows(const Eigen::MatrixXd& mass,
                                   const std::vector<Eigen::VectorXd>& family);

/// Stacks constraint blocks vertically.
Eigen::MatrixXd stack_rows(const std::vector<Eigen::MatrixXd>& blocks, int cols);

/// Rigid fields Az + b tangent to the constrained boundary (R_boundary),
/// sampled at the shell nodes. With no tangency all rigid motions are returned.
std::vector<Eigen::VectorXd> rigid_boundary_family(const ShellGrid& grid, Tangency tangency);

/// All rigid generators (rotations first, then translations) as (A, b).
std::vector<std::pair<AmbientMat, AmbientVec>> rigid_generators(int n);

/// M-orthogonal projection onto the complement of span(family).
Eigen::VectorXd project_out(const Eigen::MatrixXd& mass,
                            const std::vector<Eigen::VectorXd>& family, const Eigen::VectorXd& u);

/// Orthonormal basis of the dealiased fields that are tangent at every
/// constrained boundary node: frame coordinates are band-limited line by
/// line and the n^h coordinate is dropped on constrained boundary layers,
/// so u . n^h vanishes there exactly.
Eigen::SparseMatrix<double> admissible_basis(const ShellGrid& grid, Tangency tangency);

/// Full reduction used by the Korn pencil: admissible basis plus
/// orthogonality rows.
ReducedSpace shell_space(const ShellGrid& grid, Tangency tangency, const Eigen::MatrixXd& mass,
                         const std::vector<Eigen::VectorXd>& orthogonal_to);

}  // namespace kornlab
