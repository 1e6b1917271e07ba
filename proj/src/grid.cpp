#include "kornlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "kornlab/errors.hpp"

namespace kornlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_resolution(int n, const char* what) {
  if (n < 8) {
    throw ResolutionError(std::string("resolution ") + what + " = " + std::to_string(n) +
                          " is below the minimum of 8");
  }
}

AmbientVec cross3(const AmbientVec& a, const AmbientVec& b) {
  AmbientVec c(3);
  c << a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0);
  return c;
}

// Fejer's first rule on the polar midpoint nodes: sum_k w_k f(phi_k)
// approximates the integral of f(phi) sin(phi) over [0, pi] spectrally.
std::vector<double> fejer_weights(int n) {
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) {
    const double phi = std::numbers::pi * (k + 0.5) / n;
    double s = 0.0;
    for (int j = 1; j <= n / 2; ++j) s += std::cos(2 * j * phi) / (4.0 * j * j - 1.0);
    w[k] = 2.0 / n * (1.0 - 2.0 * s);
  }
  return w;
}

}  // namespace

SurfaceGrid::SurfaceGrid(const Hypersurface& surface, int n1, int n2) : surface_(surface) {
  const int d = surface.param_dim();
  check_resolution(n1, "n1");
  std::vector<int> extents{n1};
  if (d == 2) {
    check_resolution(n2, "n2");
    extents.push_back(n2);
  }
  std::vector<Eigen::MatrixXd> diff;
  std::vector<bool> periodic;
  const bool sphere = surface.kind() == SurfaceKind::Sphere;
  for (int a = 0; a < d; ++a) {
    if (sphere && a == 0) {
      diff.emplace_back();
      periodic.push_back(false);
    } else {
      diff.push_back(fourier_diff_matrix(extents[a]));
      periodic.push_back(true);
    }
  }
  layout_ = TensorLayout(extents, diff, periodic);

  const std::vector<double> polar = sphere ? fejer_weights(extents[0]) : std::vector<double>{};
  const int size = layout_.size();
  params_.resize(size);
  samples_.resize(size);
  weights_.resize(size);
  for (int i = 0; i < size; ++i) {
    Params u{0.0, 0.0};
    double cell = 1.0;
    for (int a = 0; a < d; ++a) {
      const int k = layout_.coord(i, a);
      const int n = extents[a];
      const double period = surface.period(a);
      if (sphere && a == 0) {
        // The area element already carries sin(phi); the Fejer weight replaces it.
        u[a] = period * (k + 0.5) / n;
        cell *= polar[k] / std::sin(u[a]);
      } else {
        u[a] = period * k / n;
        cell *= period / n;
      }
    }
    params_[i] = u;
    samples_[i] = surface.sample(u);
    weights_[i] = cell * samples_[i].area_element;
  }
}

ShellGrid::ShellGrid(const ShellDomain& shell, const Resolution& res)
    : shell_(shell), res_(res), base_(shell.surface(), res.n1, res.n2),
      rule_((check_resolution(res.nt, "nt"), lobatto_rule(res.nt))) {
  const int n = base_.ambient_dim();
  const int d = base_.param_dim();
  const int ns = base_.size();
  const int nt = res_.nt;

  std::vector<int> extents;
  std::vector<Eigen::MatrixXd> diff;
  std::vector<bool> periodic;
  for (int a = 0; a < d; ++a) {
    extents.push_back(base_.layout().extent(a));
    diff.push_back(base_.layout().diff(a));
    periodic.push_back(true);
  }
  extents.push_back(nt);
  diff.push_back(rule_.diff);
  periodic.push_back(false);
  layout_ = TensorLayout(extents, diff, periodic);

  nodes_.resize(ns * nt);
  thickness_.resize(ns);
  for (auto& f : frames_) f.resize(ns);
  for (auto& w : boundary_weights_) w.resize(ns);

  const AmbientMat id = AmbientMat::Identity(n, n);
  for (int i = 0; i < ns; ++i) {
    const Params& u = base_.params(i);
    const SurfaceSample& smp = base_.sample(i);
    const Thickness th = shell_.thickness_at(u);
    thickness_[i] = th;
    const double len = th.g1h + th.g2h;
    double cell = 1.0;
    for (int a = 0; a < d; ++a) cell *= kTwoPi / extents[a];

    for (int k = 0; k < nt; ++k) {
      ShellNode& node = nodes_[i * nt + k];
      node.s = rule_.nodes(k);
      node.t = -th.g1h + node.s * len;
      node.point = smp.point + node.t * smp.normal;
      node.jacobian = shell_.jacobian(u, node.t);
      AmbientMat chart(n, n);
      for (int a = 0; a < d; ++a) {
        const double dt = -th.dg1h[a] + node.s * (th.dg1h[a] + th.dg2h[a]);
        chart.col(a) = (id + node.t * smp.shape) * smp.tangents.col(a) + dt * smp.normal;
      }
      chart.col(d) = len * smp.normal;
      node.chart_inv = chart.inverse();
      node.weight = cell * rule_.weights(k) * std::abs(chart.determinant());
    }

    for (Side side : {Side::Minus, Side::Plus}) {
      const double sign = side == Side::Plus ? 1.0 : -1.0;
      const double g = side == Side::Plus ? th.g2h : th.g1h;
      const Params& dg = side == Side::Plus ? th.dg2h : th.dg1h;
      AmbientMat offset(n, d);
      for (int a = 0; a < d; ++a)
        offset.col(a) = (id + sign * g * smp.shape) * smp.tangents.col(a) + sign * dg[a] * smp.normal;
      const double area = d == 1 ? offset.col(0).norm() : cross3(offset.col(0), offset.col(1)).norm();
      boundary_weights_[index(side)][i] = cell * area;

      AmbientMat frame(n, n);
      frame.col(0) = shell_.offset_boundary_normal(u, side);
      for (int a = 0; a < d; ++a) {
        AmbientVec v = smp.tangents.col(a);
        for (int b = 0; b <= a; ++b) v -= frame.col(b).dot(v) * frame.col(b);
        const double vn = v.norm();
        if (!(vn > 1e-12)) throw GeometryError("degenerate boundary tangent frame");
        frame.col(a + 1) = v / vn;
      }
      frames_[index(side)][i] = frame;
    }
  }
}

double ShellGrid::volume() const {
  double v = 0.0;
  for (const ShellNode& node : nodes_) v += node.weight;
  return v;
}

void ShellGrid::write_csv(std::ostream& out) const {
  const int n = ambient_dim();
  const int d = base_.param_dim();
  out << "index";
  for (int a = 0; a < d; ++a) out << ",param" << a;
  out << ",t";
  for (int c = 0; c < n; ++c) out << ",x" << c;
  out << ",weight,boundary\n";
  out.precision(17);
  for (int i = 0; i < size(); ++i) {
    const int si = surface_index(i);
    const int k = layer(i);
    out << i;
    for (int a = 0; a < d; ++a) out << ',' << base_.params(si)[a];
    out << ',' << nodes_[i].t;
    for (int c = 0; c < n; ++c) out << ',' << nodes_[i].point(c);
    const char* flag = k == 0 ? "minus" : (k == nt() - 1 ? "plus" : "interior");
    out << ',' << nodes_[i].weight << ',' << flag << '\n';
  }
}

ShellGrid build_grid(const ShellDomain& shell, const Resolution& res) {
  return ShellGrid(shell, res);
}

std::vector<Eigen::VectorXd> chart_derivatives(const TensorLayout& layout,
                                               const Eigen::VectorXd& field, int comps) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(layout.dims());
  for (int d = 0; d < layout.dims(); ++d) out.push_back(layout.differentiate(field, comps, d));
  return out;
}

std::vector<AmbientMat> ambient_gradient(const ShellGrid& grid, const Eigen::VectorXd& field) {
  const int n = grid.ambient_dim();
  if (field.size() != grid.size() * n)
    throw DimensionError("field length does not match the shell grid");
  const std::vector<Eigen::VectorXd> deriv = chart_derivatives(grid.layout(), field, n);
  std::vector<AmbientMat> out(grid.size());
  AmbientMat chart(n, n);
  for (int i = 0; i < grid.size(); ++i) {
    for (int d = 0; d < n; ++d) chart.col(d) = deriv[d].segment(i * n, n);
    out[i] = chart * grid.node(i).chart_inv;
  }
  return out;
}

}  // namespace kornlab
