#include "kornlab/spectra.hpp"

#include <cmath>
#include <limits>

#include "kornlab/constructions.hpp"
#include "kornlab/errors.hpp"
#include "kornlab/forms.hpp"
#include "kornlab/spectral.hpp"

namespace kornlab {

namespace {

constexpr double kZeroThreshold = 1e-10;
constexpr int kReported = 4;

std::vector<Eigen::VectorXd> orthogonality_family(const ShellGrid& grid, const ConstraintSpec& spec,
                                                  const KillingBasis* killing) {
  switch (spec.orthogonality) {
    case Orthogonality::None:
      return {};
    case Orthogonality::Rigid:
      return rigid_boundary_family(grid, spec.tangency);
    case Orthogonality::Killing:
    case Orthogonality::ProfileKilling: {
      const SurfaceGrid& base = grid.base();
      const int n1 = base.layout().extent(0);
      const int n2 = base.param_dim() > 1 ? base.layout().extent(1) : 0;
      KillingBasis basis = killing ? *killing : killing_basis(grid.shell().surface(), n1, n2);
      if (spec.orthogonality == Orthogonality::ProfileKilling)
        basis = restrict_profile(base, basis, grid.shell().profile());
      std::vector<Eigen::VectorXd> family;
      for (const Eigen::VectorXd& v : basis.fields) family.push_back(trivial_extension(grid, v));
      return family;
    }
  }
  return {};
}

Pencil scalar_pencil(const ShellGrid& grid, Eigen::MatrixXd a, Eigen::MatrixXd b) {
  ReducedSpace space(dealias_basis(grid.layout(), 1), Eigen::MatrixXd(0, grid.size()));
  return Pencil{space.reduce(a), space.reduce(b), std::move(space), 0};
}

ConstantResult from_pencil(const Pencil& p, int index, int k) {
  ConstantResult r;
  r.full_dim = p.space.full_dim();
  r.reduced_dim = p.space.dim();
  r.family_dim = p.family_dim;
  r.eig = smallest_eigenpairs(p.a, p.b, std::max(k, index + 1));
  r.lambda = r.eig.eigenvalues(index);
  r.minimizer = p.space.embed(Eigen::VectorXd(r.eig.vectors.col(index)));
  return r;
}

}  // namespace

Pencil korn_pencil(const ShellGrid& grid, const ConstraintSpec& spec, const KillingBasis* killing) {
  spec.validate();
  check_dense_size(grid.size() * grid.ambient_dim());
  const QuadraticFormSet forms = assemble_forms(grid);
  const std::vector<Eigen::VectorXd> family = orthogonality_family(grid, spec, killing);
  ReducedSpace space = shell_space(grid, spec.tangency, forms.mass, family);
  Eigen::MatrixXd a = space.reduce(forms.sym);
  Eigen::MatrixXd b = space.reduce(forms.mass + forms.stiffness);
  return Pencil{std::move(a), std::move(b), std::move(space), static_cast<int>(family.size())};
}

ConstantResult korn_constant(const ShellGrid& grid, const ConstraintSpec& spec,
                             const KillingBasis* killing) {
  ConstantResult r = from_pencil(korn_pencil(grid, spec, killing), 0, kReported);
  r.degenerate = r.lambda < kZeroThreshold * r.eig.median;
  r.constant = r.degenerate ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(r.lambda);
  r.eig.degenerate = r.degenerate;
  r.eig.constant = r.constant;
  return r;
}

Pencil poincare_pencil(const ShellGrid& grid) {
  check_dense_size(grid.size());
  QuadraticFormSet f = assemble_scalar_forms(grid);
  return scalar_pencil(grid, std::move(f.stiffness), std::move(f.mass));
}

ConstantResult poincare_constant(const ShellGrid& grid) {
  ConstantResult r = from_pencil(poincare_pencil(grid), 1, kReported);
  r.degenerate = r.lambda < kZeroThreshold * r.eig.median;
  r.constant = r.degenerate ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(r.lambda);
  r.eig.degenerate = r.degenerate;
  r.eig.constant = r.constant;
  return r;
}

Pencil trace_pencil(const ShellGrid& grid) {
  check_dense_size(grid.size());
  const QuadraticFormSet f = assemble_scalar_forms(grid);
  const double h = grid.shell().h();
  return scalar_pencil(grid, -(f.trace_plus + f.trace_minus), f.mass / h + h * f.stiffness);
}

ConstantResult trace_constant(const ShellGrid& grid) {
  ConstantResult r = from_pencil(trace_pencil(grid), 0, 1);
  r.lambda = -r.lambda;
  r.constant = std::sqrt(std::max(r.lambda, 0.0));
  r.eig.constant = r.constant;
  return r;
}

LogLogFit fit_loglog(const std::vector<double>& h, const std::vector<double>& value) {
  if (h.size() != value.size()) throw DimensionError("fit needs one value per h");
  if (h.size() < 3) throw PreconditionError("a log-log fit needs at least three rows");
  LogLogFit fit;
  const int n = static_cast<int>(h.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  bool finite = true;
  for (int i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(value[i] > 0.0) || !std::isfinite(value[i])) finite = false;
    x(i, 0) = std::log(h[i]);
    x(i, 1) = 1.0;
    y(i) = std::log(value[i]);
  }
  if (!finite) {
    fit.slope = fit.intercept = fit.residual = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const Eigen::Vector2d c = x.colPivHouseholderQr().solve(y);
  fit.slope = c(0);
  fit.intercept = c(1);
  fit.residual = std::sqrt((x * c - y).squaredNorm() / n);
  fit.reliable = fit.residual <= 0.05;
  return fit;
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("kendall_tau needs paired samples");
  long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) ++ties_x;
      else if (dy == 0.0) ++ties_y;
      else if ((dx > 0) == (dy > 0)) ++concordant;
      else ++discordant;
    }
  const double n0 = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((n0 + ties_x) * (n0 + ties_y));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (concordant - discordant) / denom;
}

}  // namespace kornlab
