#include "kornlab/killing.hpp"

#include <algorithm>
#include <cmath>

#include "kornlab/constraints.hpp"
#include "kornlab/eigensolver.hpp"
#include "kornlab/errors.hpp"
#include "kornlab/forms.hpp"
#include "kornlab/spectral.hpp"

namespace kornlab {

namespace {

void require_differentiable(const SurfaceGrid& grid) {
  if (!grid.surface().differentiable())
    throw UnsupportedSurfaceError(grid.surface().name() + " grid supports quadrature only");
}

/// Returns fields * L^{-T} where L L^T is their Gram matrix in `inner`.
template <class Inner>
std::vector<Eigen::VectorXd> orthonormalize(const std::vector<Eigen::VectorXd>& fields, Inner inner) {
  const int k = static_cast<int>(fields.size());
  if (k == 0) return {};
  Eigen::MatrixXd gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = inner(fields[i], fields[j]);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw FormError("basis fields are linearly dependent");
  const Eigen::MatrixXd inv = llt.matrixL().solve(Eigen::MatrixXd::Identity(k, k));
  std::vector<Eigen::VectorXd> out(k, Eigen::VectorXd::Zero(fields[0].size()));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j) out[i] += inv(i, j) * fields[j];
  return out;
}

AmbientMat projector(const AmbientVec& n) {
  return AmbientMat::Identity(n.size(), n.size()) - n * n.transpose();
}

double gaussian_curvature(const AmbientMat& shape) {
  const double tr = shape.trace();
  return 0.5 * (tr * tr - shape.squaredNorm());
}

BochnerResult bochner_sums(const SurfaceGrid& grid, const Eigen::VectorXd& field,
                           const std::vector<AmbientMat>& grads) {
  const int n = grid.ambient_dim();
  BochnerResult r;
  r.has_covariant = n == 3;
  for (int i = 0; i < grid.size(); ++i) {
    const SurfaceSample& s = grid.sample(i);
    const double w = grid.weight(i);
    const AmbientVec u = field.segment(i * n, n);
    r.lhs += w * grads[i].squaredNorm();
    r.rhs += w * s.shape.trace() * u.dot(s.shape * u);
    if (r.has_covariant) {
      r.covariant_lhs += w * (projector(s.normal) * grads[i]).squaredNorm();
      r.covariant_rhs += w * gaussian_curvature(s.shape) * u.squaredNorm();
    }
  }
  r.relerr = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
  if (r.has_covariant)
    r.covariant_relerr = std::abs(r.covariant_lhs - r.covariant_rhs) / std::abs(r.covariant_rhs);
  return r;
}

}  // namespace

Eigen::VectorXd TangentFrames::to_ambient(const Eigen::VectorXd& coords) const {
  const int n = static_cast<int>(frame[0].rows());
  const int m = n - 1;
  Eigen::VectorXd out(frame.size() * n);
  for (std::size_t i = 0; i < frame.size(); ++i) out.segment(i * n, n) = frame[i] * coords.segment(i * m, m);
  return out;
}

Eigen::VectorXd TangentFrames::to_coords(const Eigen::VectorXd& ambient) const {
  const int n = static_cast<int>(frame[0].rows());
  const int m = n - 1;
  Eigen::VectorXd out(frame.size() * m);
  for (std::size_t i = 0; i < frame.size(); ++i)
    out.segment(i * m, m) = frame[i].transpose() * ambient.segment(i * n, n);
  return out;
}

TangentFrames tangent_frames(const SurfaceGrid& grid) {
  const int n = grid.ambient_dim();
  const int m = n - 1;
  TangentFrames f;
  f.frame.resize(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const AmbientMat& t = grid.sample(i).tangents;
    AmbientMat e(n, m);
    for (int a = 0; a < m; ++a) {
      AmbientVec v = t.col(a);
      for (int b = 0; b < a; ++b) v -= e.col(b).dot(v) * e.col(b);
      e.col(a) = v.normalized();
    }
    f.frame[i] = e;
  }
  if (!grid.surface().differentiable()) return f;
  f.dframe.assign(grid.param_dim(), std::vector<AmbientMat>(grid.size(), AmbientMat(n, m)));
  for (int a = 0; a < m; ++a) {
    Eigen::VectorXd col(grid.size() * n);
    for (int i = 0; i < grid.size(); ++i) col.segment(i * n, n) = f.frame[i].col(a);
    for (int d = 0; d < grid.param_dim(); ++d) {
      const Eigen::VectorXd dc = grid.layout().differentiate(col, n, d);
      for (int i = 0; i < grid.size(); ++i) f.dframe[d][i].col(a) = dc.segment(i * n, n);
    }
  }
  return f;
}

SurfaceForms surface_forms(const Hypersurface& surface, int n1, int n2) {
  if (!surface.differentiable())
    throw UnsupportedSurfaceError("surface forms need a differentiable chart; " + surface.name() +
                                  " is quadrature-only");
  SurfaceForms forms{SurfaceGrid(surface, n1, n2), {}, {}, {}, {}};
  const SurfaceGrid& grid = forms.grid;
  forms.frames = tangent_frames(grid);
  const int n = grid.ambient_dim();
  const int m = n - 1;
  const int d = grid.param_dim();
  const int jet = (1 + d) * m;
  const TangentFrames& fr = forms.frames;

  auto gradient_rows = [&](int p) {
    const AmbientMat& dual = grid.sample(p).dual;
    const AmbientMat& e = fr.frame[p];
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n * n, jet);
    for (int al = 0; al < d; ++al) {
      const AmbientMat& de = fr.dframe[al][p];
      for (int a = 0; a < m; ++a)
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) {
            l(i * n + k, (al + 1) * m + a) += e(i, a) * dual(k, al);
            l(i * n + k, a) += de(i, a) * dual(k, al);
          }
    }
    return l;
  };

  forms.mass = Eigen::MatrixXd::Zero(grid.size() * m, grid.size() * m);
  for (int i = 0; i < grid.size(); ++i)
    for (int a = 0; a < m; ++a) forms.mass(i * m + a, i * m + a) = grid.weight(i);

  forms.stiffness = assemble_jet_form(grid.layout(), m, [&](int p, Eigen::MatrixXd& h) {
    const Eigen::MatrixXd l = gradient_rows(p);
    h.noalias() = grid.weight(p) * l.transpose() * l;
  });
  forms.sym = assemble_jet_form(grid.layout(), m, [&](int p, Eigen::MatrixXd& h) {
    const Eigen::MatrixXd l = gradient_rows(p);
    const AmbientMat& e = fr.frame[p];
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m * m, jet);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k)
            q.row(a * m + b) += 0.5 * (e(i, a) * e(k, b) + e(i, b) * e(k, a)) * l.row(i * n + k);
    h.noalias() = grid.weight(p) * q.transpose() * q;
  });
  return forms;
}

KillingBasis killing_basis(const SurfaceForms& forms, const KillingPolicy& policy) {
  const SurfaceGrid& grid = forms.grid;
  const int m = grid.ambient_dim() - 1;
  const int full = grid.size() * m;
  const ReducedSpace space(dealias_basis(grid.layout(), m), Eigen::MatrixXd(0, full));
  const Eigen::MatrixXd a = space.reduce(forms.sym);
  const Eigen::MatrixXd b = space.reduce(forms.mass + forms.stiffness);
  const int probe = std::min(policy.probe, space.dim());
  const EigenResult r = smallest_eigenpairs(a, b, probe);

  KillingBasis basis;
  basis.median = r.median;
  basis.threshold = policy.relative_threshold * r.median;
  basis.spectrum.assign(r.eigenvalues.data(), r.eigenvalues.data() + probe);
  int k = 0;
  while (k < probe && r.eigenvalues(k) < basis.threshold) ++k;
  if (k == probe) throw AmbiguousKernelError("near-kernel fills every probed eigenvalue", basis.spectrum);
  const double floor = 1e-16 * r.median;
  const double below = k == 0 ? basis.threshold : std::max(r.eigenvalues(k - 1), floor);
  basis.gap = r.eigenvalues(k) / below;
  if (basis.gap < policy.gap)
    throw AmbiguousKernelError("no spectral gap of factor " + std::to_string(policy.gap) +
                                   " separates the near-kernel",
                               basis.spectrum);

  std::vector<Eigen::VectorXd> coords;
  for (int j = 0; j < k; ++j) {
    coords.push_back(space.embed(Eigen::VectorXd(r.vectors.col(j))));
    basis.eigenvalues.push_back(r.eigenvalues(j));
  }
  coords = orthonormalize(coords, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(forms.mass * y);
  });
  for (const auto& c : coords) basis.fields.push_back(forms.frames.to_ambient(c));
  return basis;
}

KillingBasis killing_basis(const Hypersurface& surface, int n1, int n2, const KillingPolicy& policy) {
  return killing_basis(surface_forms(surface, n1, n2), policy);
}

double surface_inner(const SurfaceGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const int n = grid.ambient_dim();
  double s = 0.0;
  for (int i = 0; i < grid.size(); ++i) s += grid.weight(i) * a.segment(i * n, n).dot(b.segment(i * n, n));
  return s;
}

KillingBasis rigid_tangent_basis(const SurfaceGrid& grid) {
  const int n = grid.ambient_dim();
  const auto gens = rigid_generators(n);
  const int g = static_cast<int>(gens.size());
  std::vector<Eigen::VectorXd> sampled(g, Eigen::VectorXd(grid.size() * n));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(g, g);
  Eigen::VectorXd flux(g);
  for (int i = 0; i < grid.size(); ++i) {
    const SurfaceSample& s = grid.sample(i);
    for (int k = 0; k < g; ++k) {
      const AmbientVec v = gens[k].first * s.point + gens[k].second;
      sampled[k].segment(i * n, n) = v;
      flux(k) = v.dot(s.normal);
    }
    gram += grid.weight(i) * flux * flux.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  KillingBasis basis;
  basis.median = eig.eigenvalues()(g / 2);
  basis.threshold = 1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff();
  basis.spectrum.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + g);
  std::vector<Eigen::VectorXd> fields;
  int k = 0;
  for (; k < g && eig.eigenvalues()(k) < basis.threshold; ++k) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(grid.size() * n);
    for (int j = 0; j < g; ++j) f += eig.eigenvectors()(j, k) * sampled[j];
    fields.push_back(std::move(f));
    basis.eigenvalues.push_back(eig.eigenvalues()(k));
  }
  if (k < g) basis.gap = eig.eigenvalues()(k) / std::max(k ? eig.eigenvalues()(k - 1) : basis.threshold, 1e-300);
  basis.fields = orthonormalize(fields, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return surface_inner(grid, x, y);
  });
  return basis;
}

KillingBasis restrict_profile(const SurfaceGrid& grid, const KillingBasis& basis,
                              const ThicknessProfile& profile) {
  const int n = grid.ambient_dim();
  const int k = basis.dim();
  std::vector<AmbientVec> grad_sum(grid.size());
  double grad_size = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const Params p1 = profile.g1.param_gradient(grid.params(i));
    const Params p2 = profile.g2.param_gradient(grid.params(i));
    ChartVec c(grid.param_dim());
    for (int a = 0; a < c.size(); ++a) c(a) = p1[a] + p2[a];
    grad_sum[i] = grid.sample(i).dual * c;
    grad_size = std::max(grad_size, grad_sum[i].norm());
  }
  if (k == 0 || grad_size == 0.0) return basis;

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd proj(k);
  for (int i = 0; i < grid.size(); ++i) {
    for (int j = 0; j < k; ++j) proj(j) = basis.fields[j].segment(i * n, n).dot(grad_sum[i]);
    p += grid.weight(i) * proj * proj.transpose();
  }
  // The basis is L2-orthonormal, so P's eigenvalues are Rayleigh quotients.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p);
  KillingBasis out;
  out.threshold = 1e-8;
  out.median = basis.median;
  out.spectrum.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + k);
  for (int j = 0; j < k; ++j) {
    if (eig.eigenvalues()(j) >= out.threshold) continue;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(basis.fields[0].size());
    for (int l = 0; l < k; ++l) f += eig.eigenvectors()(l, j) * basis.fields[l];
    out.fields.push_back(std::move(f));
    out.eigenvalues.push_back(eig.eigenvalues()(j));
  }
  return out;
}

std::vector<AmbientMat> surface_gradient(const SurfaceGrid& grid, const Eigen::VectorXd& field) {
  require_differentiable(grid);
  const int n = grid.ambient_dim();
  if (field.size() != grid.size() * n) throw DimensionError("field length does not match the surface grid");
  std::vector<Eigen::VectorXd> deriv;
  for (int d = 0; d < grid.param_dim(); ++d) deriv.push_back(grid.layout().differentiate(field, n, d));
  std::vector<AmbientMat> out(grid.size(), AmbientMat::Zero(n, n));
  for (int i = 0; i < grid.size(); ++i) {
    const AmbientMat& dual = grid.sample(i).dual;
    for (int d = 0; d < grid.param_dim(); ++d)
      out[i] += deriv[d].segment(i * n, n) * dual.col(d).transpose();
  }
  return out;
}

BochnerResult bochner_check(const SurfaceGrid& grid, const Eigen::VectorXd& field) {
  const std::vector<AmbientMat> grads = surface_gradient(grid, field);
  const int n = grid.ambient_dim();
  double sym = 0.0, norm = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const AmbientMat p = projector(grid.sample(i).normal);
    const AmbientMat t = p * grads[i] * p;
    sym += grid.weight(i) * (0.5 * (t + t.transpose())).squaredNorm();
    norm += grid.weight(i) * (field.segment(i * n, n).squaredNorm() + grads[i].squaredNorm());
  }
  if (!(sym <= 1e-6 * norm))
    throw PreconditionError("field is not a Killing field: relative tangential strain " +
                            std::to_string(sym / norm));
  return bochner_sums(grid, field, grads);
}

BochnerResult bochner_check(const SurfaceGrid& grid, const AmbientMat& a, const AmbientVec& b) {
  const int n = grid.ambient_dim();
  Eigen::VectorXd field(grid.size() * n);
  std::vector<AmbientMat> grads(grid.size());
  double flux = 0.0, norm = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const SurfaceSample& s = grid.sample(i);
    const AmbientVec v = a * s.point + b;
    field.segment(i * n, n) = v;
    grads[i] = a * projector(s.normal);
    flux += grid.weight(i) * std::pow(v.dot(s.normal), 2);
    norm += grid.weight(i) * v.squaredNorm();
  }
  if (!(flux <= 1e-20 * norm)) throw PreconditionError("rigid field is not tangent to the surface");
  return bochner_sums(grid, field, grads);
}

}  // namespace kornlab
