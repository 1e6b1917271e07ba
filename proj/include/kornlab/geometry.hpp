#pragma once

#include <array>
#include <string>

#include <Eigen/Dense>

namespace kornlab {

// Ambient quantities live in R^2 or R^3; the max-size template arguments keep
// them on the stack.
using AmbientVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using AmbientMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using ChartMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 2, 2>;
using ChartVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2, 1>;

/// Surface parameters. Curves use only the first entry (theta); surfaces use
/// (phi, psi). For tori phi is the meridian angle and psi the azimuth about
/// the z axis; for the sphere phi is the polar angle.
using Params = std::array<double, 2>;

enum class SurfaceKind { Circle, Ellipse, Torus, BumpyTorus, Sphere };

/// Everything about the surface at one parameter point.
struct SurfaceSample {
  AmbientVec point;
  AmbientMat tangents;  // n x (n-1), columns dx/du_a
  AmbientVec normal;    // outward unit normal
  AmbientMat shape;     // n x n shape operator, grad of the normal
  ChartMat metric;      // first fundamental form
  ChartMat metric_inv;
  AmbientMat dual;      // tangents * metric_inv; grad f = dual * df/du
  double area_element = 0.0;
};

class Hypersurface {
 public:
  static Hypersurface circle(double radius = 1.0);
  static Hypersurface ellipse(double a, double b);
  static Hypersurface torus(double major, double minor);
  static Hypersurface bumpy_torus(double major, double minor, double eps = 0.15, int mode = 3);
  static Hypersurface sphere(double radius = 1.0);

  SurfaceKind kind() const { return kind_; }
  std::string name() const;
  int ambient_dim() const;
  int param_dim() const { return ambient_dim() - 1; }
  /// False for the quadrature-only sphere (pole-singular chart).
  bool differentiable() const { return kind_ != SurfaceKind::Sphere; }
  /// Period of parameter `a` (2 pi, except the sphere's polar angle, pi).
  double period(int a) const;
  /// Parameter index for "theta" / "phi" / "psi"; throws ConfigError otherwise.
  int param_index(const std::string& param_name) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double eps() const { return eps_; }
  int mode() const { return mode_; }

  AmbientVec point(const Params& u) const;
  AmbientMat tangents(const Params& u) const;
  AmbientVec unit_normal(const Params& u) const;
  AmbientMat shape_operator(const Params& u) const;
  SurfaceSample sample(const Params& u) const;

 private:
  Hypersurface(SurfaceKind kind, double a, double b, double eps, int mode);
  /// d^2 x / du_a du_b, flattened column-wise into n x (d*d).
  using SecondDerivatives = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 4>;
  SecondDerivatives second_derivatives(const Params& u) const;
  AmbientVec oriented_normal(const AmbientMat& tangents) const;

  SurfaceKind kind_;
  double a_;  // radius / semi-axis a / torus major radius
  double b_;  // semi-axis b / torus minor radius
  double eps_ = 0.0;
  int mode_ = 0;
};

/// Closed-form thickness expression: constant, or base + amp*cos(mode*param).
struct ProfileExpr {
  enum class Kind { Const, Cos };
  Kind kind = Kind::Const;
  double base = 1.0;
  double amp = 0.0;
  int mode = 1;
  int param = 0;

  static ProfileExpr constant(double c) { return {Kind::Const, c, 0.0, 1, 0}; }
  static ProfileExpr cosine(double base, double amp, int mode, int param) {
    return {Kind::Cos, base, amp, mode, param};
  }
  double value(const Params& u) const;
  /// Derivatives with respect to the surface parameters.
  Params param_gradient(const Params& u) const;
};

enum class Regime { H1, H2 };

/// g1, g2 with the thickness scaling. Under H2, g_i^h = h g_i. The H1 preset
/// uses g_i^h = h g_i (1 + growth_i h), so g_i^h/h is not constant in h.
struct ThicknessProfile {
  ProfileExpr g1 = ProfileExpr::constant(1.0);
  ProfileExpr g2 = ProfileExpr::constant(1.0);
  Regime regime = Regime::H2;
  std::array<double, 2> h1_growth{0.0, 0.0};

  double scale(int side, double h) const;
};

/// Bounds C1 h <= g_i^h <= C2 h, |grad g_i^h| <= C3 h observed on a grid.
struct ProfileBounds {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

/// g_1^h, g_2^h and their parameter derivatives at one surface point.
struct Thickness {
  double g1h = 0.0;
  double g2h = 0.0;
  Params dg1h{0.0, 0.0};
  Params dg2h{0.0, 0.0};
};

enum class Side { Minus, Plus };

class ShellDomain {
 public:
  ShellDomain(Hypersurface surface, ThicknessProfile profile, double h);

  const Hypersurface& surface() const { return surface_; }
  const ThicknessProfile& profile() const { return profile_; }
  double h() const { return h_; }

  Thickness thickness_at(const Params& u) const;
  /// det(Id + t Pi(x)); throws ShellIntersectionError when not positive.
  double jacobian(const Params& u, double t) const;
  /// Exact outward unit normal of the offset boundary x -/+ g^h n(x).
  AmbientVec offset_boundary_normal(const Params& u, Side side) const;
  /// Surface gradient of g_i^h (side 0 -> g1, 1 -> g2).
  AmbientVec thickness_gradient(const SurfaceSample& s, const Params& u, int side) const;

  /// Checks positivity of the profile and of the shell Jacobian on a
  /// validation grid; returns the observed (H1) constants.
  ProfileBounds validate(int samples_per_param = 64) const;

 private:
  Hypersurface surface_;
  ThicknessProfile profile_;
  double h_;
};

double shell_jacobian(const ShellDomain& shell, const Params& u, double t);

}  // namespace kornlab
