#include "kornlab/constructions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kornlab/errors.hpp"
#include "kornlab/forms.hpp"

namespace kornlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_surface_field(const ShellGrid& grid, const Eigen::VectorXd& v) {
  if (v.size() != grid.base().size() * grid.ambient_dim())
    throw DimensionError("surface field length does not match the shell's base grid");
}

/// Per-node (comps x n) surface gradients of an interleaved surface field.
std::vector<Eigen::MatrixXd> surface_gradients(const SurfaceGrid& grid, const Eigen::VectorXd& f,
                                               int comps) {
  const int n = grid.ambient_dim();
  std::vector<Eigen::VectorXd> deriv;
  for (int d = 0; d < grid.param_dim(); ++d) deriv.push_back(grid.layout().differentiate(f, comps, d));
  std::vector<Eigen::MatrixXd> out(grid.size(), Eigen::MatrixXd::Zero(comps, n));
  for (int i = 0; i < grid.size(); ++i)
    for (int d = 0; d < grid.param_dim(); ++d)
      out[i] += deriv[d].segment(i * comps, comps) * grid.sample(i).dual.col(d).transpose();
  return out;
}

AmbientVec thickness_sum_gradient(const ShellGrid& grid, int i) {
  const Thickness& th = grid.thickness(i);
  const SurfaceSample& s = grid.base().sample(i);
  ChartVec c(grid.base().param_dim());
  for (int a = 0; a < c.size(); ++a) c(a) = th.dg1h[a] + th.dg2h[a];
  return s.dual * c;
}

AmbientVec thickness_gradient(const ShellGrid& grid, int i, Side side) {
  const Thickness& th = grid.thickness(i);
  const Params& dg = side == Side::Plus ? th.dg2h : th.dg1h;
  ChartVec c(grid.base().param_dim());
  for (int a = 0; a < c.size(); ++a) c(a) = dg[a];
  return grid.base().sample(i).dual * c;
}

}  // namespace

Eigen::VectorXd extend_killing(const ShellGrid& grid, const Eigen::VectorXd& v) {
  check_surface_field(grid, v);
  const int n = grid.ambient_dim();
  const double h = grid.shell().h();
  Eigen::VectorXd out(grid.size() * n);
  for (int i = 0; i < grid.base().size(); ++i) {
    const SurfaceSample& s = grid.base().sample(i);
    const AmbientVec vi = v.segment(i * n, n);
    const double flux = thickness_gradient(grid, i, Side::Plus).dot(vi) / h;
    const AmbientVec pv = s.shape * vi;
    for (int k = 0; k < grid.nt(); ++k) {
      const int node = grid.node_index(i, k);
      const double t = grid.node(node).t;
      out.segment(node * n, n) = vi + t * pv + h * flux * s.normal;
    }
  }
  return out;
}

Eigen::VectorXd trivial_extension(const ShellGrid& grid, const Eigen::VectorXd& v) {
  check_surface_field(grid, v);
  const int n = grid.ambient_dim();
  Eigen::VectorXd out(grid.size() * n);
  for (int i = 0; i < grid.base().size(); ++i)
    for (int k = 0; k < grid.nt(); ++k) out.segment(grid.node_index(i, k) * n, n) = v.segment(i * n, n);
  return out;
}

AveragedField normal_average(const ShellGrid& grid, const Eigen::VectorXd& u) {
  const int n = grid.ambient_dim();
  const int ns = grid.base().size();
  if (u.size() != grid.size() * n) throw DimensionError("field length does not match the shell grid");
  const Eigen::VectorXd& w = grid.thickness_rule().weights;
  AveragedField avg{Eigen::VectorXd::Zero(ns * n), Eigen::VectorXd(ns), Eigen::VectorXd(ns * n)};
  for (int i = 0; i < ns; ++i) {
    for (int k = 0; k < grid.nt(); ++k) avg.mean.segment(i * n, n) += w(k) * u.segment(grid.node_index(i, k) * n, n);
    const AmbientVec& nrm = grid.base().sample(i).normal;
    avg.normal(i) = avg.mean.segment(i * n, n).dot(nrm);
    avg.tangential.segment(i * n, n) = avg.mean.segment(i * n, n) - avg.normal(i) * nrm;
  }
  return avg;
}

double MollifierSpec::bump(double s) {
  if (s < 0.0 || s >= 1.0) return 0.0;
  if (s <= 0.25) return 1.0;
  const double q = (s - 0.25) / 0.75;
  return std::pow(1.0 - q * q, 4);
}

double MollifierSpec::normalization(int dim) {
  using boost::math::quadrature::gauss_kronrod;
  if (dim == 1) {
    const double tail = gauss_kronrod<double, 61>::integrate(bump, 0.25, 1.0);
    return 1.0 / (2.0 * (0.25 + tail));
  }
  const double tail =
      gauss_kronrod<double, 61>::integrate([](double s) { return s * bump(s); }, 0.25, 1.0);
  return 1.0 / (2.0 * std::numbers::pi * (0.5 * 0.25 * 0.25 + tail));
}

std::vector<AmbientMat> mollified_rotation(const ShellGrid& grid, const Eigen::VectorXd& u,
                                           const MollifierSpec& spec) {
  const int n = grid.ambient_dim();
  const int ns = grid.base().size();
  const int dim = grid.base().param_dim();
  const std::vector<AmbientMat> grads = ambient_gradient(grid, u);

  std::vector<AmbientMat> fiber_skew(ns, AmbientMat::Zero(n, n));
  std::vector<double> fiber_weight(ns, 0.0);
  for (int i = 0; i < ns; ++i) {
    for (int k = 0; k < grid.nt(); ++k) {
      const int node = grid.node_index(i, k);
      const double w = grid.node(node).weight;
      fiber_skew[i] += 0.5 * w * (grads[node] - grads[node].transpose());
      fiber_weight[i] += w;
    }
  }

  const double radius = spec.radius_multiple * grid.shell().h();
  std::vector<AmbientMat> r(ns);
  for (int i = 0; i < ns; ++i) {
    const AmbientVec& x = grid.base().sample(i).point;
    AmbientMat num = AmbientMat::Zero(n, n);
    double den = 0.0;
    int neighbours = 0;
    for (int j = 0; j < ns; ++j) {
      const double theta = spec.profile((grid.base().sample(j).point - x).norm() / radius, dim);
      if (theta == 0.0) continue;
      if (j != i) ++neighbours;
      num += theta * fiber_skew[j];
      den += theta * fiber_weight[j];
    }
    if (neighbours == 0)
      throw ResolutionError("mollification ball of radius " + std::to_string(radius) +
                            " contains no neighbouring grid node");
    const AmbientMat ri = num / den;
    r[i] = 0.5 * (ri - ri.transpose());
  }
  return r;
}

double boundary_residual(const ShellGrid& grid, const Eigen::VectorXd& u, Tangency scenario) {
  const int n = grid.ambient_dim();
  double worst = 0.0;
  for (Side side : {Side::Minus, Side::Plus}) {
    if (!constrains(scenario, side)) continue;
    for (int i = 0; i < grid.base().size(); ++i) {
      const AmbientVec nh = grid.boundary_frame(side, i).col(0);
      worst = std::max(worst, std::abs(u.segment(grid.boundary_node(side, i) * n, n).dot(nh)));
    }
  }
  return worst;
}

LemmaRatios lemma_ratios(const ShellGrid& grid, const Eigen::VectorXd& u, Tangency scenario,
                         const MollifierSpec& spec) {
  const int n = grid.ambient_dim();
  const int ns = grid.base().size();
  const SurfaceGrid& base = grid.base();
  const double h = grid.shell().h();
  const double sqh = std::sqrt(h);

  const double scale = u.cwiseAbs().maxCoeff();
  if (boundary_residual(grid, u, scenario) > 1e-8 * std::max(scale, 1e-300))
    throw PreconditionError("field violates the tangency condition of scenario '" +
                            to_string(scenario) + "'");

  const ShellEnergies e = shell_energies(grid, u);
  LemmaRatios out;
  out.w12_norm = std::sqrt(e.w12());
  out.sym_norm = std::sqrt(e.sym);
  const double wn = out.w12_norm;
  const double dn = out.sym_norm;

  const AveragedField avg = normal_average(grid, u);
  const std::vector<AmbientMat> r = mollified_rotation(grid, u, spec);
  const std::vector<Eigen::MatrixXd> grad_mean = surface_gradients(base, avg.mean, n);
  const std::vector<Eigen::MatrixXd> grad_normal = surface_gradients(base, avg.normal, 1);

  Eigen::VectorXd r_entries(ns * n * n);
  for (int i = 0; i < ns; ++i)
    r_entries.segment(i * n * n, n * n) = Eigen::Map<const Eigen::VectorXd>(r[i].data(), n * n);
  const std::vector<Eigen::MatrixXd> grad_r = surface_gradients(base, r_entries, n * n);

  double normal_sq = 0.0, lem2_sq = 0.0, gradn_sq = 0.0, rn_sq = 0.0, mean_sq = 0.0;
  double flux = 0.0, trace_v_sq = 0.0, grad_r_sq = 0.0, plus_normal_sq = 0.0;
  for (int i = 0; i < ns; ++i) {
    const SurfaceSample& s = base.sample(i);
    const double w = base.weight(i);
    const AmbientMat p = AmbientMat::Identity(n, n) - s.normal * s.normal.transpose();
    const AmbientVec mean = avg.mean.segment(i * n, n);
    normal_sq += w * avg.normal(i) * avg.normal(i);
    lem2_sq += w * (grad_mean[i] - r[i] * p).squaredNorm();
    gradn_sq += w * grad_normal[i].squaredNorm();
    rn_sq += w * (r[i] * s.normal).squaredNorm();
    mean_sq += w * mean.squaredNorm();
    flux += w * std::abs(mean.dot(thickness_sum_gradient(grid, i)));
    const AmbientVec um = u.segment(grid.boundary_node(Side::Minus, i) * n, n);
    const AmbientVec up = u.segment(grid.boundary_node(Side::Plus, i) * n, n);
    const double mixed = um.dot(thickness_gradient(grid, i, Side::Minus)) +
                         up.dot(thickness_gradient(grid, i, Side::Plus));
    trace_v_sq += w * mixed * mixed;
    grad_r_sq += w * grad_r[i].squaredNorm();
    plus_normal_sq += grid.boundary_weight(Side::Plus, i) * std::pow(up.dot(s.normal), 2);
  }

  const std::vector<AmbientMat> grads = ambient_gradient(grid, u);
  double approx_sq = 0.0;
  for (int node = 0; node < grid.size(); ++node)
    approx_sq += grid.node(node).weight * (grads[node] - r[grid.surface_index(node)]).squaredNorm();

  const bool plus = constrains(scenario, Side::Plus);
  const bool both = scenario == Tangency::Both;
  const bool h2 = grid.shell().profile().regime == Regime::H2;
  const double lem2_bound = sqh * wn + dn / sqh;

  out.lem1_numerator = std::sqrt(normal_sq);
  out.lem1 = plus ? out.lem1_numerator / (sqh * wn) : kNaN;
  out.lem2 = std::sqrt(lem2_sq) / lem2_bound;
  out.lem3 = plus ? (std::sqrt(gradn_sq) + std::sqrt(rn_sq)) /
                        (std::sqrt(mean_sq) + wn + dn / sqh + std::sqrt(wn * dn / h))
                  : kNaN;
  out.ass_h2 = both && h2 ? (flux / h) / lem2_bound : kNaN;
  out.trivial_iv = plus ? std::sqrt(plus_normal_sq) / (sqh * wn) : kNaN;
  out.trivial_v = both && h2 ? std::sqrt(trace_v_sq / (h * dn * dn + h * h * h * wn * wn)) : kNaN;
  out.approx_i = std::sqrt(approx_sq) / dn;
  out.approx_ii = h * sqh * std::sqrt(grad_r_sq) / dn;
  return out;
}

Eigen::VectorXd sample_field(const ShellGrid& grid, std::uint64_t seed, Tangency scenario) {
  constexpr int kModes = 3;
  constexpr int kDegree = 2;
  const int n = grid.ambient_dim();
  const int d = grid.base().param_dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // 1D trigonometric basis 1, cos k u, sin k u for k <= kModes.
  const int per_dir = 2 * kModes + 1;
  auto trig = [](int j, double x) {
    if (j == 0) return 1.0;
    const int k = (j + 1) / 2;
    return j % 2 ? std::cos(k * x) : std::sin(k * x);
  };
  const int n_tang = d == 1 ? per_dir : per_dir * per_dir;
  std::vector<double> coef(static_cast<std::size_t>(n) * n_tang * (kDegree + 1));
  for (double& c : coef) c = normal(rng);

  Eigen::VectorXd u(grid.size() * n);
  for (int node = 0; node < grid.size(); ++node) {
    const Params& p = grid.base().params(grid.surface_index(node));
    const double s = grid.node(node).s;
    for (int c = 0; c < n; ++c) {
      double val = 0.0;
      std::size_t idx = static_cast<std::size_t>(c) * n_tang * (kDegree + 1);
      for (int j = 0; j < n_tang; ++j) {
        const double tang = d == 1 ? trig(j, p[0]) : trig(j / per_dir, p[0]) * trig(j % per_dir, p[1]);
        double poly = 1.0;
        for (int q = 0; q <= kDegree; ++q, poly *= s) val += coef[idx++] * tang * poly;
      }
      u(node * n + c) = val;
    }
  }

  for (int i = 0; i < grid.base().size(); ++i) {
    const double c_plus = constrains(scenario, Side::Plus)
                              ? u.segment(grid.boundary_node(Side::Plus, i) * n, n).dot(grid.boundary_frame(Side::Plus, i).col(0))
                              : 0.0;
    const double c_minus = constrains(scenario, Side::Minus)
                               ? u.segment(grid.boundary_node(Side::Minus, i) * n, n).dot(grid.boundary_frame(Side::Minus, i).col(0))
                               : 0.0;
    const AmbientVec n_plus = grid.boundary_frame(Side::Plus, i).col(0);
    const AmbientVec n_minus = grid.boundary_frame(Side::Minus, i).col(0);
    for (int k = 0; k < grid.nt(); ++k) {
      const int node = grid.node_index(i, k);
      const double s = grid.node(node).s;
      const double up = s * s * (3.0 - 2.0 * s);
      const double down = 1.0 - up;
      u.segment(node * n, n) -= up * c_plus * n_plus + down * c_minus * n_minus;
    }
  }
  return u / std::sqrt(shell_energies(grid, u).w12());
}

}  // namespace kornlab
