#include "kornlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kornlab/errors.hpp"

namespace kornlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

AmbientVec vec2(double x, double y) {
  AmbientVec v(2);
  v << x, y;
  return v;
}

AmbientVec vec3(double x, double y, double z) {
  AmbientVec v(3);
  v << x, y, z;
  return v;
}

AmbientVec cross(const AmbientVec& a, const AmbientVec& b) {
  return vec3(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

}  // namespace

Hypersurface::Hypersurface(SurfaceKind kind, double a, double b, double eps, int mode)
    : kind_(kind), a_(a), b_(b), eps_(eps), mode_(mode) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("surface radii must be positive");
  if ((kind == SurfaceKind::Torus || kind == SurfaceKind::BumpyTorus) &&
      !(b * (1.0 + std::abs(eps)) < a)) {
    throw ConfigError("torus minor radius must be smaller than the major radius");
  }
  if (kind == SurfaceKind::BumpyTorus && !(std::abs(eps) < 1.0)) {
    throw ConfigError("bump amplitude must satisfy |eps| < 1");
  }
}

Hypersurface Hypersurface::circle(double radius) {
  return {SurfaceKind::Circle, radius, radius, 0.0, 0};
}
Hypersurface Hypersurface::ellipse(double a, double b) {
  return {SurfaceKind::Ellipse, a, b, 0.0, 0};
}
Hypersurface Hypersurface::torus(double major, double minor) {
  return {SurfaceKind::Torus, major, minor, 0.0, 0};
}
Hypersurface Hypersurface::bumpy_torus(double major, double minor, double eps, int mode) {
  return {SurfaceKind::BumpyTorus, major, minor, eps, mode};
}
Hypersurface Hypersurface::sphere(double radius) {
  return {SurfaceKind::Sphere, radius, radius, 0.0, 0};
}

std::string Hypersurface::name() const {
  switch (kind_) {
    case SurfaceKind::Circle: return "circle";
    case SurfaceKind::Ellipse: return "ellipse";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::BumpyTorus: return "bumpy-torus";
    case SurfaceKind::Sphere: return "sphere";
  }
  return "unknown";
}

int Hypersurface::ambient_dim() const {
  return (kind_ == SurfaceKind::Circle || kind_ == SurfaceKind::Ellipse) ? 2 : 3;
}

double Hypersurface::period(int a) const {
  if (kind_ == SurfaceKind::Sphere && a == 0) return std::numbers::pi;
  return kTwoPi;
}

int Hypersurface::param_index(const std::string& param_name) const {
  if (ambient_dim() == 2) {
    if (param_name == "theta") return 0;
  } else {
    if (param_name == "phi") return 0;
    if (param_name == "psi") return 1;
  }
  throw ConfigError("parameter '" + param_name + "' does not exist on surface " + name(),
                    "param");
}

AmbientVec Hypersurface::point(const Params& u) const {
  const double p = u[0];
  const double q = u[1];
  switch (kind_) {
    case SurfaceKind::Circle:
    case SurfaceKind::Ellipse:
      return vec2(a_ * std::cos(p), b_ * std::sin(p));
    case SurfaceKind::Torus:
    case SurfaceKind::BumpyTorus: {
      const double rho = b_ * (1.0 + eps_ * std::cos(mode_ * q));
      const double ring = a_ + rho * std::cos(p);
      return vec3(ring * std::cos(q), ring * std::sin(q), rho * std::sin(p));
    }
    case SurfaceKind::Sphere:
      return vec3(a_ * std::sin(p) * std::cos(q), a_ * std::sin(p) * std::sin(q),
                  a_ * std::cos(p));
  }
  throw ConfigError("unknown surface kind", "kind");
}

AmbientMat Hypersurface::tangents(const Params& u) const {
  const double p = u[0];
  const double q = u[1];
  switch (kind_) {
    case SurfaceKind::Circle:
    case SurfaceKind::Ellipse: {
      AmbientMat t(2, 1);
      t << -a_ * std::sin(p), b_ * std::cos(p);
      return t;
    }
    case SurfaceKind::Torus:
    case SurfaceKind::BumpyTorus: {
      const double rho = b_ * (1.0 + eps_ * std::cos(mode_ * q));
      const double drho = -b_ * eps_ * mode_ * std::sin(mode_ * q);
      const double ring = a_ + rho * std::cos(p);
      AmbientMat t(3, 2);
      t.col(0) = vec3(-rho * std::sin(p) * std::cos(q), -rho * std::sin(p) * std::sin(q),
                      rho * std::cos(p));
      t.col(1) = vec3(drho * std::cos(p) * std::cos(q) - ring * std::sin(q),
                      drho * std::cos(p) * std::sin(q) + ring * std::cos(q),
                      drho * std::sin(p));
      return t;
    }
    case SurfaceKind::Sphere: {
      AmbientMat t(3, 2);
      t.col(0) = vec3(a_ * std::cos(p) * std::cos(q), a_ * std::cos(p) * std::sin(q),
                      -a_ * std::sin(p));
      t.col(1) = vec3(-a_ * std::sin(p) * std::sin(q), a_ * std::sin(p) * std::cos(q), 0.0);
      return t;
    }
  }
  throw ConfigError("unknown surface kind", "kind");
}

Hypersurface::SecondDerivatives Hypersurface::second_derivatives(const Params& u) const {
  const double p = u[0];
  const double q = u[1];
  switch (kind_) {
    case SurfaceKind::Circle:
    case SurfaceKind::Ellipse:
      return -point(u);
    case SurfaceKind::Torus: {
      const double ring = a_ + b_ * std::cos(p);
      SecondDerivatives d(3, 4);
      d.col(0) = vec3(-b_ * std::cos(p) * std::cos(q), -b_ * std::cos(p) * std::sin(q),
                      -b_ * std::sin(p));
      d.col(1) = vec3(b_ * std::sin(p) * std::sin(q), -b_ * std::sin(p) * std::cos(q), 0.0);
      d.col(2) = d.col(1);
      d.col(3) = vec3(-ring * std::cos(q), -ring * std::sin(q), 0.0);
      return d;
    }
    case SurfaceKind::BumpyTorus: {
      // Fourth-order central differences of the analytic tangents.
      constexpr double step = 1e-3;
      SecondDerivatives d(3, 4);
      for (int b = 0; b < 2; ++b) {
        auto shifted = [&](double k) {
          Params v = u;
          v[b] += k * step;
          return tangents(v);
        };
        const AmbientMat diff =
            (-shifted(2.0) + 8.0 * shifted(1.0) - 8.0 * shifted(-1.0) + shifted(-2.0)) /
            (12.0 * step);
        for (int a = 0; a < 2; ++a) d.col(a + 2 * b) = diff.col(a);
      }
      // Symmetrize the mixed derivative.
      const AmbientVec mixed = 0.5 * (d.col(1) + d.col(2));
      d.col(1) = mixed;
      d.col(2) = mixed;
      return d;
    }
    case SurfaceKind::Sphere: {
      SecondDerivatives d(3, 4);
      d.col(0) = -point(u);
      d.col(1) = vec3(-a_ * std::cos(p) * std::sin(q), a_ * std::cos(p) * std::cos(q), 0.0);
      d.col(2) = d.col(1);
      d.col(3) = vec3(-a_ * std::sin(p) * std::cos(q), -a_ * std::sin(p) * std::sin(q), 0.0);
      return d;
    }
  }
  throw ConfigError("unknown surface kind", "kind");
}

AmbientVec Hypersurface::oriented_normal(const AmbientMat& t) const {
  AmbientVec n;
  if (ambient_dim() == 2) {
    // Counter-clockwise parametrization: rotate the tangent clockwise.
    n = vec2(t(1, 0), -t(0, 0));
  } else if (kind_ == SurfaceKind::Sphere) {
    n = cross(t.col(0), t.col(1));
  } else {
    n = cross(t.col(1), t.col(0));
  }
  const double len = n.norm();
  if (!(len > 1e-14)) throw GeometryError("degenerate tangent basis on " + name());
  return n / len;
}

AmbientVec Hypersurface::unit_normal(const Params& u) const {
  return oriented_normal(tangents(u));
}

AmbientMat Hypersurface::shape_operator(const Params& u) const { return sample(u).shape; }

SurfaceSample Hypersurface::sample(const Params& u) const {
  SurfaceSample s;
  const int d = param_dim();
  s.point = point(u);
  s.tangents = tangents(u);
  s.normal = oriented_normal(s.tangents);
  s.metric = s.tangents.transpose() * s.tangents;
  const double det = s.metric.determinant();
  if (!(det > 0.0)) throw GeometryError("degenerate metric on " + name());
  s.metric_inv = s.metric.inverse();
  s.area_element = std::sqrt(det);
  s.dual = s.tangents * s.metric_inv;

  // Second fundamental form B_ab = x_ab . n; Pi = -dual B dual^T.
  const SecondDerivatives second = second_derivatives(u);
  ChartMat form(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) form(a, b) = second.col(a + d * b).dot(s.normal);
  form = 0.5 * (form + form.transpose()).eval();
  s.shape = -s.dual * form * s.dual.transpose();
  s.shape = 0.5 * (s.shape + s.shape.transpose()).eval();
  return s;
}

double ProfileExpr::value(const Params& u) const {
  if (kind == Kind::Const) return base;
  return base + amp * std::cos(mode * u[param]);
}

Params ProfileExpr::param_gradient(const Params& u) const {
  Params g{0.0, 0.0};
  if (kind == Kind::Cos) g[param] = -amp * mode * std::sin(mode * u[param]);
  return g;
}

double ThicknessProfile::scale(int side, double h) const {
  if (regime == Regime::H2) return h;
  return h * (1.0 + h1_growth[side] * h);
}

ShellDomain::ShellDomain(Hypersurface surface, ThicknessProfile profile, double h)
    : surface_(std::move(surface)), profile_(profile), h_(h) {
  if (!(h > 0.0)) throw ConfigError("h must be positive", "h");
  if (!surface_.differentiable())
    throw UnsupportedSurfaceError("the sphere is quadrature-only; it admits no shell");
  const int d = surface_.param_dim();
  for (const ProfileExpr* e : {&profile_.g1, &profile_.g2}) {
    if (e->kind == ProfileExpr::Kind::Cos && (e->param < 0 || e->param >= d))
      throw ConfigError("profile parameter out of range for " + surface_.name(), "param");
  }
}

Thickness ShellDomain::thickness_at(const Params& u) const {
  Thickness th;
  const double s1 = profile_.scale(0, h_);
  const double s2 = profile_.scale(1, h_);
  th.g1h = s1 * profile_.g1.value(u);
  th.g2h = s2 * profile_.g2.value(u);
  const Params d1 = profile_.g1.param_gradient(u);
  const Params d2 = profile_.g2.param_gradient(u);
  for (int a = 0; a < 2; ++a) {
    th.dg1h[a] = s1 * d1[a];
    th.dg2h[a] = s2 * d2[a];
  }
  return th;
}

AmbientVec ShellDomain::thickness_gradient(const SurfaceSample& s, const Params& u,
                                           int side) const {
  const Thickness th = thickness_at(u);
  const Params& dg = side == 0 ? th.dg1h : th.dg2h;
  ChartVec c(surface_.param_dim());
  for (int a = 0; a < c.size(); ++a) c(a) = dg[a];
  return s.dual * c;
}

double ShellDomain::jacobian(const Params& u, double t) const {
  const AmbientMat pi = surface_.shape_operator(u);
  const AmbientMat id = AmbientMat::Identity(pi.rows(), pi.cols());
  const double det = (id + t * pi).determinant();
  if (!(det > 0.0)) {
    throw ShellIntersectionError("shell self-intersects: det(Id + t Pi) = " +
                                 std::to_string(det));
  }
  return det;
}

double shell_jacobian(const ShellDomain& shell, const Params& u, double t) {
  const Thickness th = shell.thickness_at(u);
  if (t < -th.g1h * (1.0 + 1e-12) || t > th.g2h * (1.0 + 1e-12))
    throw PreconditionError("offset t outside [-g1^h, g2^h]");
  return shell.jacobian(u, t);
}

AmbientVec ShellDomain::offset_boundary_normal(const Params& u, Side side) const {
  const SurfaceSample s = surface_.sample(u);
  const Thickness th = thickness_at(u);
  const double sign = side == Side::Plus ? 1.0 : -1.0;
  const double g = side == Side::Plus ? th.g2h : th.g1h;
  const Params& dg = side == Side::Plus ? th.dg2h : th.dg1h;
  const int n = surface_.ambient_dim();
  const AmbientMat id = AmbientMat::Identity(n, n);
  AmbientMat offset(n, n - 1);
  for (int a = 0; a < n - 1; ++a)
    offset.col(a) = (id + sign * g * s.shape) * s.tangents.col(a) + sign * dg[a] * s.normal;
  AmbientVec nh;
  if (n == 2) {
    nh = vec2(offset(1, 0), -offset(0, 0));
  } else {
    nh = cross(offset.col(0), offset.col(1));
  }
  const double len = nh.norm();
  if (!(len > 1e-14)) throw GeometryError("degenerate offset tangent basis");
  nh /= len;
  if (sign * nh.dot(s.normal) < 0.0) nh = -nh;
  return nh;
}

ProfileBounds ShellDomain::validate(int samples) const {
  const int d = surface_.param_dim();
  const int n1 = samples;
  const int n2 = d == 2 ? samples : 1;
  ProfileBounds b{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const Params u{kTwoPi * i / n1, kTwoPi * j / n2};
      const SurfaceSample s = surface_.sample(u);
      const Thickness th = thickness_at(u);
      if (!(th.g1h > 0.0) || !(th.g2h > 0.0))
        throw ConfigError("thickness profile must be positive", "profile");
      jacobian(u, -th.g1h);
      jacobian(u, th.g2h);
      b.c1 = std::min({b.c1, th.g1h / h_, th.g2h / h_});
      b.c2 = std::max({b.c2, th.g1h / h_, th.g2h / h_});
      for (int side = 0; side < 2; ++side)
        b.c3 = std::max(b.c3, thickness_gradient(s, u, side).norm() / h_);
    }
  }
  return b;
}

}  // namespace kornlab
