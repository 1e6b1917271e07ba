#include "kornlab/forms.hpp"

#include <vector>

#include "kornlab/errors.hpp"

namespace kornlab {

namespace {

struct JetEntry {
  int node;
  int slot;
  double coef;
};

Eigen::MatrixXd diagonal_form(const ShellGrid& grid, int comps, bool boundary_only, Side side) {
  const int n = grid.size() * comps;
  check_dense_size(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  if (!boundary_only) {
    for (int i = 0; i < grid.size(); ++i)
      for (int c = 0; c < comps; ++c) a(i * comps + c, i * comps + c) = grid.node(i).weight;
    return a;
  }
  for (int i = 0; i < grid.base().size(); ++i) {
    const int node = grid.boundary_node(side, i);
    for (int c = 0; c < comps; ++c)
      a(node * comps + c, node * comps + c) = grid.boundary_weight(side, i);
  }
  return a;
}

}  // namespace

void check_dense_size(int dofs) {
  if (dofs > kMaxDenseDofs) {
    throw ResolutionError("dense forms limited to " + std::to_string(kMaxDenseDofs) +
                          " unknowns, requested " + std::to_string(dofs));
  }
}

Eigen::MatrixXd assemble_jet_form(const TensorLayout& layout, int comps,
                                  const LocalHessian& local) {
  const int dims = layout.dims();
  const int jet = (1 + dims) * comps;
  const int n = layout.size() * comps;
  check_dense_size(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd h(jet, jet);
  std::vector<JetEntry> entries;
  for (int p = 0; p < layout.size(); ++p) {
    h.setZero();
    local(p, h);
    entries.clear();
    entries.push_back({p, 0, 1.0});
    for (int d = 0; d < dims; ++d) {
      const Eigen::MatrixXd& op = layout.diff(d);
      if (op.size() == 0) continue;
      const int i = layout.coord(p, d);
      const int base = p - i * layout.stride(d);
      for (int q = 0; q < layout.extent(d); ++q) {
        const double coef = op(i, q);
        if (coef != 0.0) entries.push_back({base + q * layout.stride(d), d + 1, coef});
      }
    }
    for (const JetEntry& e1 : entries) {
      for (const JetEntry& e2 : entries) {
        const double scale = e1.coef * e2.coef;
        for (int c1 = 0; c1 < comps; ++c1) {
          for (int c2 = 0; c2 < comps; ++c2) {
            const double hv = h(e1.slot * comps + c1, e2.slot * comps + c2);
            if (hv != 0.0) a(e1.node * comps + c1, e2.node * comps + c2) += scale * hv;
          }
        }
      }
    }
  }
  return a;
}

Eigen::MatrixXd field_jets(const TensorLayout& layout, const Eigen::VectorXd& field, int comps) {
  const int dims = layout.dims();
  Eigen::MatrixXd jets((1 + dims) * comps, layout.size());
  for (int i = 0; i < layout.size(); ++i) jets.block(0, i, comps, 1) = field.segment(i * comps, comps);
  for (int d = 0; d < dims; ++d) {
    const Eigen::VectorXd df = layout.differentiate(field, comps, d);
    for (int i = 0; i < layout.size(); ++i)
      jets.block((d + 1) * comps, i, comps, 1) = df.segment(i * comps, comps);
  }
  return jets;
}

Eigen::MatrixXd gradient_map(const ShellGrid& grid, int node, int comps) {
  const int n = grid.ambient_dim();
  const AmbientMat& inv = grid.node(node).chart_inv;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(comps * n, (1 + n) * comps);
  for (int c = 0; c < comps; ++c)
    for (int k = 0; k < n; ++k)
      for (int d = 0; d < n; ++d) l(c * n + k, (d + 1) * comps + c) = inv(d, k);
  return l;
}

Eigen::MatrixXd symmetric_gradient_map(const ShellGrid& grid, int node) {
  const int n = grid.ambient_dim();
  const Eigen::MatrixXd g = gradient_map(grid, node, n);
  Eigen::MatrixXd s(g.rows(), g.cols());
  for (int c = 0; c < n; ++c)
    for (int k = 0; k < n; ++k) s.row(c * n + k) = 0.5 * (g.row(c * n + k) + g.row(k * n + c));
  return s;
}

QuadraticFormSet assemble_forms(const ShellGrid& grid) {
  const int n = grid.ambient_dim();
  QuadraticFormSet f;
  f.mass = diagonal_form(grid, n, false, Side::Plus);
  f.stiffness = assemble_jet_form(grid.layout(), n, [&](int node, Eigen::MatrixXd& h) {
    const Eigen::MatrixXd l = gradient_map(grid, node, n);
    h.noalias() = grid.node(node).weight * l.transpose() * l;
  });
  f.sym = assemble_jet_form(grid.layout(), n, [&](int node, Eigen::MatrixXd& h) {
    const Eigen::MatrixXd l = symmetric_gradient_map(grid, node);
    h.noalias() = grid.node(node).weight * l.transpose() * l;
  });
  f.trace_plus = diagonal_form(grid, n, true, Side::Plus);
  f.trace_minus = diagonal_form(grid, n, true, Side::Minus);
  return f;
}

QuadraticFormSet assemble_scalar_forms(const ShellGrid& grid) {
  QuadraticFormSet f;
  f.mass = diagonal_form(grid, 1, false, Side::Plus);
  f.stiffness = assemble_jet_form(grid.layout(), 1, [&](int node, Eigen::MatrixXd& h) {
    const Eigen::MatrixXd l = gradient_map(grid, node, 1);
    h.noalias() = grid.node(node).weight * l.transpose() * l;
  });
  f.trace_plus = diagonal_form(grid, 1, true, Side::Plus);
  f.trace_minus = diagonal_form(grid, 1, true, Side::Minus);
  return f;
}

ShellEnergies shell_energies(const ShellGrid& grid, const Eigen::VectorXd& field) {
  const int n = grid.ambient_dim();
  const std::vector<AmbientMat> grads = ambient_gradient(grid, field);
  ShellEnergies e;
  for (int i = 0; i < grid.size(); ++i) {
    const double w = grid.node(i).weight;
    const AmbientMat& g = grads[i];
    const AmbientMat sym = 0.5 * (g + g.transpose());
    e.mass += w * field.segment(i * n, n).squaredNorm();
    e.grad += w * g.squaredNorm();
    e.sym += w * sym.squaredNorm();
  }
  for (int i = 0; i < grid.base().size(); ++i) {
    e.trace_plus += grid.boundary_weight(Side::Plus, i) *
                    field.segment(grid.boundary_node(Side::Plus, i) * n, n).squaredNorm();
    e.trace_minus += grid.boundary_weight(Side::Minus, i) *
                     field.segment(grid.boundary_node(Side::Minus, i) * n, n).squaredNorm();
  }
  return e;
}

}  // namespace kornlab
