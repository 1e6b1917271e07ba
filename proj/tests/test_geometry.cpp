#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "kornlab/config.hpp"
#include "kornlab/errors.hpp"
#include "kornlab/geometry.hpp"

namespace kornlab {
namespace {

constexpr double kPi = std::numbers::pi;

AmbientVec vec(std::initializer_list<double> v) {
  AmbientVec out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Central differences of the unit normal along each parameter line.
AmbientMat normal_derivatives_fd(const Hypersurface& s, const Params& u, double step) {
  const int d = s.param_dim();
  AmbientMat out(s.ambient_dim(), d);
  for (int a = 0; a < d; ++a) {
    Params up = u, dn = u;
    up[a] += step;
    dn[a] -= step;
    out.col(a) = (s.unit_normal(up) - s.unit_normal(dn)) / (2.0 * step);
  }
  return out;
}

// Shape operator rebuilt from finite differences: sum_a dn/du_a (x) x^a.
AmbientMat shape_fd(const Hypersurface& s, const Params& u, double step) {
  const SurfaceSample smp = s.sample(u);
  return normal_derivatives_fd(s, u, step) * smp.dual.transpose();
}

std::vector<Hypersurface> families() {
  return {Hypersurface::circle(), Hypersurface::ellipse(1.3, 0.8), Hypersurface::torus(2.0, 1.0),
          Hypersurface::bumpy_torus(2.0, 1.0, 0.15, 3)};
}

TEST(SurfacePoint, ClosedFormExamples) {
  EXPECT_LT((Hypersurface::circle().point({0.0, 0.0}) - vec({1, 0})).norm(), 1e-15);
  EXPECT_LT((Hypersurface::torus(2, 1).point({0.0, 0.0}) - vec({3, 0, 0})).norm(), 1e-15);
  EXPECT_LT((Hypersurface::ellipse(1.3, 0.8).point({kPi / 2, 0.0}) - vec({0, 0.8})).norm(), 1e-15);
}

TEST(UnitNormal, ClosedFormExamples) {
  EXPECT_LT((Hypersurface::circle().unit_normal({kPi / 2, 0.0}) - vec({0, 1})).norm(), 1e-15);
  EXPECT_LT((Hypersurface::torus(2, 1).unit_normal({0.0, 0.0}) - vec({1, 0, 0})).norm(), 1e-15);
  EXPECT_LT((Hypersurface::ellipse(1.3, 0.8).unit_normal({0.0, 0.0}) - vec({1, 0})).norm(), 1e-15);
}

// Curves enclose the origin; for tori "outward" is measured from the core
// circle of radius R in the xy-plane.
TEST(UnitNormal, PointsOutOfTheEnclosedRegion) {
  for (const Hypersurface& s : families())
    for (int i = 0; i < 16; ++i) {
      const Params u{0.37 * i, 0.91 * i};
      AmbientVec x = s.point(u);
      if (s.ambient_dim() == 3) {
        AmbientVec core = x;
        core(2) = 0.0;
        x -= s.a() * core.normalized();
      }
      EXPECT_GT(s.unit_normal(u).dot(x), 0.0) << s.name();
    }
}

TEST(ShapeOperator, UnitCircleCurvatureIsOne) {
  const Hypersurface c = Hypersurface::circle();
  for (double th : {0.0, 0.7, 2.1, 4.4}) {
    const SurfaceSample s = c.sample({th, 0.0});
    const AmbientVec tau = s.tangents.col(0).normalized();
    EXPECT_NEAR(tau.dot(s.shape * tau), 1.0, 1e-13);
  }
}

TEST(ShapeOperator, TorusOuterEquatorMatchesFiniteDifferences) {
  const Hypersurface t = Hypersurface::torus(2, 1);
  const Params u{0.0, 0.0};
  const AmbientMat pi = t.shape_operator(u);
  const AmbientMat oracle = shape_fd(t, u, 1e-4);
  EXPECT_LT((pi - oracle).norm(), 1e-7);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(oracle.transpose() * 0.5 + oracle * 0.5);
  // Tangent curvatures {1/3, 1}; the normal direction carries 0.
  EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-7);
  EXPECT_NEAR(es.eigenvalues()(1), 1.0 / 3.0, 1e-7);
  EXPECT_NEAR(es.eigenvalues()(2), 1.0, 1e-7);
}

TEST(ShapeOperator, EllipseCurvatureMatchesFiniteDifferencesAndClosedForm) {
  const double a = 1.3, b = 0.8;
  const Hypersurface e = Hypersurface::ellipse(a, b);
  for (double th : {0.0, 0.4, 1.3, 2.9, 5.0}) {
    const SurfaceSample s = e.sample({th, 0.0});
    const AmbientVec tau = s.tangents.col(0).normalized();
    const double kappa = tau.dot(s.shape * tau);
    const double fd = tau.dot(shape_fd(e, {th, 0.0}, 1e-4) * tau);
    const double closed = a * b / std::pow(a * a * std::sin(th) * std::sin(th) + b * b * std::cos(th) * std::cos(th), 1.5);
    EXPECT_NEAR(kappa, fd, 1e-7);
    EXPECT_NEAR(kappa, closed, 1e-12);
  }
  const SurfaceSample s0 = e.sample({0.0, 0.0});
  const AmbientVec tau0 = s0.tangents.col(0).normalized();
  EXPECT_NEAR(tau0.dot(s0.shape * tau0), 2.03125, 1e-12);
}

TEST(ShapeOperator, FiniteDifferencesConvergeAtSecondOrder) {
  for (const Hypersurface& s : families()) {
    const Params u{0.83, 2.2};
    const AmbientMat pi = s.shape_operator(u);
    const double e1 = (shape_fd(s, u, 2e-2) - pi).norm();
    const double e2 = (shape_fd(s, u, 1e-2) - pi).norm();
    EXPECT_GT(std::log2(e1 / e2), 1.9) << s.name();
  }
}

TEST(ShapeOperator, SymmetricAndAnnihilatesNormal) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  for (const Hypersurface& s : families()) {
    double asym = 0.0, normal = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Params u{angle(rng), angle(rng)};
      const SurfaceSample smp = s.sample(u);
      asym = std::max(asym, (smp.shape - smp.shape.transpose()).norm());
      normal = std::max(normal, (smp.shape * smp.normal).norm());
    }
    EXPECT_LT(asym, 1e-10) << s.name();
    EXPECT_LT(normal, 1e-10) << s.name();
  }
}

TEST(Geometry, PeriodicAcrossTheSeam) {
  for (const Hypersurface& s : families()) {
    const Params u{0.3, 1.1};
    Params w = u;
    for (int a = 0; a < s.param_dim(); ++a) w[a] += s.period(a);
    EXPECT_LT((s.point(u) - s.point(w)).norm(), 1e-13) << s.name();
    EXPECT_LT((s.shape_operator(u) - s.shape_operator(w)).norm(), 1e-9) << s.name();
  }
}

TEST(ShellJacobian, Examples) {
  const ShellDomain circle(Hypersurface::circle(), {}, 0.1);
  EXPECT_NEAR(shell_jacobian(circle, {0.4, 0.0}, 0.1), 1.1, 1e-14);
  EXPECT_NEAR(shell_jacobian(circle, {0.4, 0.0}, 0.0), 1.0, 1e-15);
  const ShellDomain torus(Hypersurface::torus(2, 1), {}, 0.3);
  EXPECT_NEAR(shell_jacobian(torus, {0.0, 0.0}, 0.0), 1.0, 1e-15);
  // Oracle: product of (1 + t kappa_i) with curvatures from finite differences.
  const Hypersurface tor = Hypersurface::torus(2, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(shape_fd(tor, {0.0, 0.0}, 1e-4));
  const double oracle = (1 + 0.3 * es.eigenvalues()(1)) * (1 + 0.3 * es.eigenvalues()(2));
  EXPECT_NEAR(shell_jacobian(torus, {0.0, 0.0}, 0.3), oracle, 1e-7);
  EXPECT_NEAR(shell_jacobian(torus, {0.0, 0.0}, 0.3), 1.43, 1e-12);
}

TEST(ShellJacobian, SelfIntersectionAndRangeErrors) {
  const ShellDomain circle(Hypersurface::circle(), {}, 1.0);
  EXPECT_THROW(circle.jacobian({0.0, 0.0}, -1.0), ShellIntersectionError);
  EXPECT_THROW(shell_jacobian(circle, {0.0, 0.0}, 1.5), PreconditionError);
  EXPECT_THROW(ShellDomain(Hypersurface::circle(), {}, 1.2).validate(), ShellIntersectionError);
}

TEST(OffsetNormal, ParallelBoundariesOfTheAnnulus) {
  for (double h : {0.05, 0.2}) {
    const ShellDomain shell(Hypersurface::circle(), {}, h);
    for (double th : {0.0, 1.0, 3.0}) {
      const AmbientVec n = shell.surface().unit_normal({th, 0.0});
      EXPECT_LT((shell.offset_boundary_normal({th, 0.0}, Side::Plus) - n).norm(), 1e-14);
      EXPECT_LT((shell.offset_boundary_normal({th, 0.0}, Side::Minus) + n).norm(), 1e-14);
    }
  }
}

TEST(OffsetNormal, DeviatesFromTiltedNormalAtSecondOrder) {
  ThicknessProfile p;
  p.g2 = ProfileExpr::cosine(1.0, 0.5, 1, 0);
  const Hypersurface e = Hypersurface::ellipse(1.3, 0.8);
  std::vector<double> c;
  for (double h : {0.1, 0.05, 0.025}) {
    const ShellDomain shell(e, p, h);
    double err = 0.0;
    for (int i = 0; i < 64; ++i) {
      const Params u{2 * kPi * i / 64, 0.0};
      const SurfaceSample s = e.sample(u);
      const AmbientVec tilted = (s.normal - shell.thickness_gradient(s, u, 1)).normalized();
      err = std::max(err, (shell.offset_boundary_normal(u, Side::Plus) - tilted).norm());
    }
    c.push_back(err / (h * h));
  }
  for (double ci : c) EXPECT_LT(ci, 1.5 * c.front());
  EXPECT_LT(c.back(), 10.0);
}

TEST(Thickness, Examples) {
  const ShellDomain flat(Hypersurface::circle(), {}, 0.1);
  EXPECT_DOUBLE_EQ(flat.thickness_at({0.3, 0.0}).g1h, 0.1);
  EXPECT_DOUBLE_EQ(flat.thickness_at({0.3, 0.0}).g2h, 0.1);

  ThicknessProfile p;
  p.g2 = ProfileExpr::cosine(1.0, 0.5, 1, 0);
  EXPECT_NEAR(ShellDomain(Hypersurface::ellipse(1.3, 0.8), p, 0.1).thickness_at({0.0, 0.0}).g2h, 0.15, 1e-15);

  ThicknessProfile h1;
  h1.regime = Regime::H1;
  h1.h1_growth = {0.0, 1.0};
  const double h = 0.07;
  const Thickness th = ShellDomain(Hypersurface::circle(), h1, h).thickness_at({1.0, 0.0});
  EXPECT_DOUBLE_EQ(th.g1h, h);
  EXPECT_DOUBLE_EQ(th.g2h, h * (1 + h));
}

TEST(Thickness, ValidationReportsProfileBounds) {
  ThicknessProfile p;
  p.g2 = ProfileExpr::cosine(1.0, 0.5, 1, 0);
  const ProfileBounds b = ShellDomain(Hypersurface::ellipse(1.3, 0.8), p, 0.1).validate();
  EXPECT_NEAR(b.c1, 0.5, 1e-12);
  EXPECT_NEAR(b.c2, 1.5, 1e-12);
  EXPECT_GT(b.c3, 0.0);
}

TEST(SurfaceConfig, UnknownKindIsAConfigError) {
  try {
    parse_surface({{"kind", "klein-bottle"}});
    FAIL() << "no error";
  } catch (const ConfigError& e) {
    EXPECT_FALSE(e.key().empty());
  }
}

}  // namespace
}  // namespace kornlab
