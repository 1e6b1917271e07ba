#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kornlab/constraints.hpp"
#include "kornlab/grid.hpp"

namespace kornlab {

/// v^h(x + t n) = (Id + t Pi + h n (x) grad g2) v, with grad g2 = grad g2^h / h.
/// `v` holds ambient components of a tangent field on grid.base().
Eigen::VectorXd extend_killing(const ShellGrid& grid, const Eigen::VectorXd& v);

/// (v pi)(x + t n) = v(x).
Eigen::VectorXd trivial_extension(const ShellGrid& grid, const Eigen::VectorXd& v);

/// Fiber mean of a shell field, split into normal and tangential parts.
struct AveragedField {
  Eigen::VectorXd mean;        // n per surface node
  Eigen::VectorXd normal;      // one per surface node
  Eigen::VectorXd tangential;  // n per surface node
};

AveragedField normal_average(const ShellGrid& grid, const Eigen::VectorXd& u);

/// Cutoff theta(s) = c on [0, 1/4], c (1 - ((s - 1/4) / (3/4))^2)^4 on (1/4, 1),
/// zero beyond; c normalizes the integral of theta(|y|) over R^dim to one.
struct MollifierSpec {
  double radius_multiple = 1.0;

  static double bump(double s);
  static double normalization(int dim);
  double profile(double s, int dim) const { return normalization(dim) * bump(s); }
};

/// R(x) = sum_z eta_x(z) skew(grad u(z)) w(z), with eta_x built from
/// theta(|pi z - x| / (multiple h)) and normalized to unit discrete mass.
std::vector<AmbientMat> mollified_rotation(const ShellGrid& grid, const Eigen::VectorXd& u,
                                           const MollifierSpec& spec = {});

/// Each lemma's left side over its right side with unit constants. NaN
/// marks a ratio whose boundary conditions the scenario does not provide.
struct LemmaRatios {
  double lem1 = 0.0;
  double lem2 = 0.0;
  double lem3 = 0.0;
  double ass_h2 = 0.0;
  double trivial_iv = 0.0;
  double trivial_v = 0.0;
  double approx_i = 0.0;
  double approx_ii = 0.0;

  double w12_norm = 0.0;       // ||u||_{W^{1,2}(S^h)}
  double sym_norm = 0.0;       // ||D(u)||_{L^2(S^h)}
  double lem1_numerator = 0.0; // ||u_bar . n||_{L^2(S)}
};

LemmaRatios lemma_ratios(const ShellGrid& grid, const Eigen::VectorXd& u, Tangency scenario,
                         const MollifierSpec& spec = {});

/// max |u . n^h| over the boundary layers constrained by `scenario`.
double boundary_residual(const ShellGrid& grid, const Eigen::VectorXd& u, Tangency scenario);

/// Smooth seeded field: low Fourier modes in the surface parameters times
/// low powers of s, with the boundary-normal part removed by a smooth blend
/// on the sides of `scenario`, normalized to unit W^{1,2} norm.
Eigen::VectorXd sample_field(const ShellGrid& grid, std::uint64_t seed, Tangency scenario);

}  // namespace kornlab
