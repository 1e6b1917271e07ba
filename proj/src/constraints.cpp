#include "kornlab/constraints.hpp"

#include "kornlab/errors.hpp"
#include "kornlab/spectral.hpp"

namespace kornlab {

void ConstraintSpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0, 1)", "alpha");
}

Tangency parse_tangency(const std::string& s) {
  if (s == "none") return Tangency::None;
  if (s == "plus") return Tangency::Plus;
  if (s == "minus") return Tangency::Minus;
  if (s == "both") return Tangency::Both;
  throw ConfigError("unknown tangency '" + s + "'", "tangency");
}

Orthogonality parse_orthogonality(const std::string& s) {
  if (s == "none") return Orthogonality::None;
  if (s == "rigid") return Orthogonality::Rigid;
  if (s == "killing") return Orthogonality::Killing;
  if (s == "profile-killing") return Orthogonality::ProfileKilling;
  throw ConfigError("unknown orthogonality family '" + s + "'", "orthogonality");
}

std::string to_string(Tangency t) {
  switch (t) {
    case Tangency::None: return "none";
    case Tangency::Plus: return "plus";
    case Tangency::Minus: return "minus";
    case Tangency::Both: return "both";
  }
  return "none";
}

std::string to_string(Orthogonality o) {
  switch (o) {
    case Orthogonality::None: return "none";
    case Orthogonality::Rigid: return "rigid";
    case Orthogonality::Killing: return "killing";
    case Orthogonality::ProfileKilling: return "profile-killing";
  }
  return "none";
}

bool constrains(Tangency t, Side side) {
  if (t == Tangency::Both) return true;
  if (t == Tangency::Plus) return side == Side::Plus;
  if (t == Tangency::Minus) return side == Side::Minus;
  return false;
}

ReducedSpace::ReducedSpace(Eigen::SparseMatrix<double> embedding,
                           const Eigen::MatrixXd& constraints)
    : embedding_(std::move(embedding)), rows_(static_cast<int>(constraints.rows())) {
  if (rows_ == 0) return;
  if (constraints.cols() != embedding_.rows())
    throw DimensionError("constraint rows do not match the field space");
  Eigen::MatrixXd ct = (constraints * embedding_).transpose();
  for (int j = 0; j < ct.cols(); ++j) {
    const double norm = ct.col(j).norm();
    if (norm > 0.0) ct.col(j) /= norm;
  }
  qr_.setThreshold(1e-10);
  qr_.compute(ct);
  rank_ = static_cast<int>(qr_.rank());
}

Eigen::MatrixXd ReducedSpace::apply_q(const Eigen::MatrixXd& x) const {
  if (rank_ == 0) return x;
  auto q = qr_.householderQ();
  q.setLength(rank_);
  return q * x;
}

Eigen::MatrixXd ReducedSpace::apply_qt(const Eigen::MatrixXd& x) const {
  if (rank_ == 0) return x;
  auto q = qr_.householderQ();
  q.setLength(rank_);
  return q.transpose() * x;
}

Eigen::MatrixXd ReducedSpace::reduce(const Eigen::MatrixXd& form) const {
  if (form.rows() != full_dim() || form.cols() != full_dim())
    throw DimensionError("form size does not match the field space");
  const Eigen::MatrixXd ae = form * embedding_;
  Eigen::MatrixXd a = embedding_.transpose() * ae;
  a = apply_qt(a);
  a = apply_qt(a.transpose());
  const int m = dim();
  Eigen::MatrixXd out = a.bottomRightCorner(m, m);
  return 0.5 * (out + out.transpose());
}

Eigen::VectorXd ReducedSpace::embed(const Eigen::VectorXd& y) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(frame_dim());
  z.tail(dim()) = y;
  return embedding_ * apply_q(z);
}

Eigen::MatrixXd ReducedSpace::embed(const Eigen::MatrixXd& y) const {
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(frame_dim(), y.cols());
  z.bottomRows(dim()) = y;
  return embedding_ * apply_q(z);
}

Eigen::VectorXd ReducedSpace::coordinates(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd x = embedding_.transpose() * u;
  return apply_qt(x).bottomRows(dim());
}

Eigen::SparseMatrix<double> identity_embedding(int full) {
  Eigen::SparseMatrix<double> e(full, full);
  e.setIdentity();
  return e;
}

Eigen::SparseMatrix<double> tangency_embedding(const ShellGrid& grid, Tangency tangency) {
  const int n = grid.ambient_dim();
  const int nt = grid.nt();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(grid.size() * n * n);
  int col = 0;
  for (int node = 0; node < grid.size(); ++node) {
    const int k = grid.layer(node);
    const int si = grid.surface_index(node);
    const bool minus = k == 0 && constrains(tangency, Side::Minus);
    const bool plus = k == nt - 1 && constrains(tangency, Side::Plus);
    if (minus || plus) {
      const AmbientMat& frame = grid.boundary_frame(plus ? Side::Plus : Side::Minus, si);
      for (int a = 1; a < n; ++a) {
        for (int c = 0; c < n; ++c) triplets.emplace_back(node * n + c, col, frame(c, a));
        ++col;
      }
    } else {
      for (int c = 0; c < n; ++c) triplets.emplace_back(node * n + c, col++, 1.0);
    }
  }
  Eigen::SparseMatrix<double> e(grid.size() * n, col);
  e.setFromTriplets(triplets.begin(), triplets.end());
  return e;
}

Eigen::MatrixXd orthogonality_rows(const Eigen::MatrixXd& mass,
                                   const std::vector<Eigen::VectorXd>& family) {
  Eigen::MatrixXd rows(family.size(), mass.rows());
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (family[i].size() != mass.rows())
      throw DimensionError("orthogonality field does not belong to the field space");
    rows.row(i) = (mass * family[i]).transpose();
  }
  return rows;
}

Eigen::MatrixXd stack_rows(const std::vector<Eigen::MatrixXd>& blocks, int cols) {
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.rows());
  Eigen::MatrixXd out(total, cols);
  int r = 0;
  for (const auto& b : blocks) {
    if (b.rows() == 0) continue;
    if (b.cols() != cols) throw DimensionError("constraint block has the wrong width");
    out.middleRows(r, b.rows()) = b;
    r += static_cast<int>(b.rows());
  }
  return out;
}

std::vector<std::pair<AmbientMat, AmbientVec>> rigid_generators(int n) {
  std::vector<std::pair<AmbientMat, AmbientVec>> gens;
  const AmbientVec zero = AmbientVec::Zero(n);
  if (n == 2) {
    AmbientMat a(2, 2);
    a << 0.0, -1.0, 1.0, 0.0;
    gens.emplace_back(a, zero);
  } else {
    for (int axis = 0; axis < 3; ++axis) {
      AmbientMat a = AmbientMat::Zero(3, 3);
      const int i = (axis + 1) % 3;
      const int j = (axis + 2) % 3;
      a(j, i) = 1.0;
      a(i, j) = -1.0;
      gens.emplace_back(a, zero);
    }
  }
  for (int c = 0; c < n; ++c) gens.emplace_back(AmbientMat::Zero(n, n), AmbientVec::Unit(n, c));
  return gens;
}

std::vector<Eigen::VectorXd> rigid_boundary_family(const ShellGrid& grid, Tangency tangency) {
  const int n = grid.ambient_dim();
  const auto gens = rigid_generators(n);
  const int g = static_cast<int>(gens.size());
  std::vector<Eigen::VectorXd> sampled;
  for (const auto& [a, b] : gens)
    sampled.push_back(sample_ambient(grid, [&](const AmbientVec& z) -> AmbientVec { return a * z + b; }));
  if (tangency == Tangency::None) return sampled;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(g, g);
  Eigen::VectorXd normal_parts(g);
  for (Side side : {Side::Minus, Side::Plus}) {
    if (!constrains(tangency, side)) continue;
    for (int i = 0; i < grid.base().size(); ++i) {
      const int node = grid.boundary_node(side, i);
      const AmbientVec nh = grid.boundary_frame(side, i).col(0);
      for (int k = 0; k < g; ++k) normal_parts(k) = sampled[k].segment(node * n, n).dot(nh);
      gram += grid.boundary_weight(side, i) * normal_parts * normal_parts.transpose();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Eigen::VectorXd> family;
  for (int k = 0; k < g; ++k) {
    if (eig.eigenvalues()(k) >= 1e-10 * scale) continue;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(sampled[0].size());
    for (int j = 0; j < g; ++j) f += eig.eigenvectors()(j, k) * sampled[j];
    family.push_back(std::move(f));
  }
  return family;
}

Eigen::VectorXd project_out(const Eigen::MatrixXd& mass,
                            const std::vector<Eigen::VectorXd>& family, const Eigen::VectorXd& u) {
  if (family.empty()) return u;
  Eigen::MatrixXd f(u.size(), family.size());
  for (std::size_t i = 0; i < family.size(); ++i) f.col(i) = family[i];
  const Eigen::MatrixXd mf = mass * f;
  const Eigen::MatrixXd gram = f.transpose() * mf;
  const Eigen::VectorXd coef = gram.ldlt().solve(mf.transpose() * u);
  return u - f * coef;
}

Eigen::SparseMatrix<double> admissible_basis(const ShellGrid& grid, Tangency tangency) {
  const int n = grid.ambient_dim();
  const int nt = grid.nt();
  // Frame coordinates: (n^h, tangents) on constrained boundary layers, the
  // ambient axes elsewhere.
  std::vector<Eigen::Triplet<double>> rot;
  rot.reserve(grid.size() * n * n);
  for (int node = 0; node < grid.size(); ++node) {
    const int k = grid.layer(node);
    const bool minus = k == 0 && constrains(tangency, Side::Minus);
    const bool plus = k == nt - 1 && constrains(tangency, Side::Plus);
    if (minus || plus) {
      const AmbientMat& frame = grid.boundary_frame(plus ? Side::Plus : Side::Minus, grid.surface_index(node));
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) rot.emplace_back(node * n + c, node * n + a, frame(c, a));
    } else {
      for (int c = 0; c < n; ++c) rot.emplace_back(node * n + c, node * n + c, 1.0);
    }
  }
  Eigen::SparseMatrix<double> r(grid.size() * n, grid.size() * n);
  r.setFromTriplets(rot.begin(), rot.end());

  // The thickness direction is the last layout direction and is kept whole,
  // so column j of the dealiased basis lives on layer (j / n) % nt.
  const Eigen::SparseMatrix<double> f = dealias_basis(grid.layout(), n);
  std::vector<Eigen::Triplet<double>> pick;
  int kept = 0;
  for (int j = 0; j < f.cols(); ++j) {
    const int k = (j / n) % nt;
    const bool normal = j % n == 0 && ((k == 0 && constrains(tangency, Side::Minus)) ||
                                       (k == nt - 1 && constrains(tangency, Side::Plus)));
    if (!normal) pick.emplace_back(j, kept++, 1.0);
  }
  Eigen::SparseMatrix<double> select(f.cols(), kept);
  select.setFromTriplets(pick.begin(), pick.end());
  return Eigen::SparseMatrix<double>(r * f * select);
}

ReducedSpace shell_space(const ShellGrid& grid, Tangency tangency, const Eigen::MatrixXd& mass,
                         const std::vector<Eigen::VectorXd>& orthogonal_to) {
  const int full = grid.size() * grid.ambient_dim();
  return ReducedSpace(admissible_basis(grid, tangency), stack_rows({orthogonality_rows(mass, orthogonal_to)}, full));
}

}  // namespace kornlab
