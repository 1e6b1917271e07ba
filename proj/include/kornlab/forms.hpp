#pragma once

#include <functional>

#include <Eigen/Dense>

#include "kornlab/grid.hpp"

namespace kornlab {

/// Dense forms are refused above this many unknowns.
inline constexpr int kMaxDenseDofs = 8000;

/// A nodal quadratic form given by its local Hessian on the jet
/// (value, derivative along each layout direction), interleaved as
/// jet[slot * comps + c]. The callback fills `hessian` (already weighted).
using LocalHessian = std::function<void(int node, Eigen::MatrixXd& hessian)>;

Eigen::MatrixXd assemble_jet_form(const TensorLayout& layout, int comps,
                                  const LocalHessian& local);

/// Jets of an interleaved field at every node: column i holds node i.
Eigen::MatrixXd field_jets(const TensorLayout& layout, const Eigen::VectorXd& field, int comps);

/// Linear maps from the shell jet to the entries of grad u and D(u).
Eigen::MatrixXd gradient_map(const ShellGrid& grid, int node, int comps);
Eigen::MatrixXd symmetric_gradient_map(const ShellGrid& grid, int node);

/// Dense forms on full ambient vector fields over a shell grid.
struct QuadraticFormSet {
  Eigen::MatrixXd mass;         // int |u|^2
  Eigen::MatrixXd stiffness;    // int |grad u|^2
  Eigen::MatrixXd sym;          // int |D(u)|^2
  Eigen::MatrixXd trace_plus;   // int over the plus boundary of |u|^2
  Eigen::MatrixXd trace_minus;
};

QuadraticFormSet assemble_forms(const ShellGrid& grid);

/// Scalar analogues (mass, gradient, boundary traces).
QuadraticFormSet assemble_scalar_forms(const ShellGrid& grid);

/// The same energies evaluated on a field without assembling matrices.
struct ShellEnergies {
  double mass = 0.0;
  double grad = 0.0;
  double sym = 0.0;
  double trace_plus = 0.0;
  double trace_minus = 0.0;
  double w12() const { return mass + grad; }
};

ShellEnergies shell_energies(const ShellGrid& grid, const Eigen::VectorXd& field);

void check_dense_size(int dofs);

}  // namespace kornlab
