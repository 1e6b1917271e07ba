#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "kornlab/constraints.hpp"
#include "kornlab/eigensolver.hpp"
#include "kornlab/grid.hpp"
#include "kornlab/killing.hpp"

namespace kornlab {

/// A symmetric pencil restricted to a reduced space.
struct Pencil {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  ReducedSpace space;
  int family_dim = 0;  // number of orthogonality fields imposed
};

/// An optimal constant read off a pencil.
struct ConstantResult {
  EigenResult eig;
  double lambda = 0.0;       // eigenvalue defining the constant
  double constant = 0.0;     // infinite when degenerate
  bool degenerate = false;
  int full_dim = 0;
  int reduced_dim = 0;
  int family_dim = 0;
  Eigen::VectorXd minimizer; // full field of the defining eigenvector
};

/// Korn pencil (Q, M + K) on the space cut out by `spec`. For the Killing
/// families a precomputed surface basis can be supplied; otherwise it is
/// computed on the shell's base grid.
Pencil korn_pencil(const ShellGrid& grid, const ConstraintSpec& spec,
                   const KillingBasis* killing = nullptr);
/// C_h = lambda_min^{-1/2}; lambda_min < 1e-10 * median flags degeneracy.
ConstantResult korn_constant(const ShellGrid& grid, const ConstraintSpec& spec,
                             const KillingBasis* killing = nullptr);

/// Scalar pencil (K, M); its lowest eigenvalue is the constant mode.
Pencil poincare_pencil(const ShellGrid& grid);
/// (lambda_2)^{-1/2} of the scalar Neumann pencil.
ConstantResult poincare_constant(const ShellGrid& grid);

/// Scalar pencil (-(T+ + T-), h^{-1} M + h K); minus its lowest eigenvalue is
/// the largest trace ratio.
Pencil trace_pencil(const ShellGrid& grid);
/// sqrt(lambda_max) of (T+ + T-, h^{-1} M + h K).
ConstantResult trace_constant(const ShellGrid& grid);

/// Unweighted least squares of log(value) against log(h). `residual` is the
/// RMS deviation of the logs from the line.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  bool reliable = false;  // residual <= 0.05 and every value finite and positive
};

LogLogFit fit_loglog(const std::vector<double>& h, const std::vector<double>& value);

/// Kendall tau-b rank correlation.
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  double h = 0.0;
  double value = 0.0;
  nlohmann::json meta = nlohmann::json::object();
};

struct SweepReport {
  std::string scenario;
  std::vector<SweepRow> rows;
  std::optional<LogLogFit> fit;  // present once three rows exist
  std::string failure;           // error kind and message of an aborted h
  std::string failure_kind;

  nlohmann::json summary() const;
  /// Columns h, value, slope-so-far.
  void write_csv(std::ostream& out) const;
};

/// Per-h artifact store: <root>/<config hash>/<h>.json.
class SweepCache {
 public:
  SweepCache(std::filesystem::path root, std::string config_hash);
  /// KORNLAB_CACHE, or "cache" under the working directory.
  static std::filesystem::path default_root();

  std::optional<SweepRow> load(double h) const;
  void store(const SweepRow& row) const;
  std::filesystem::path path(double h) const;

 private:
  std::filesystem::path dir_;
};

using SweepTask = std::function<SweepRow(double h)>;

/// Runs `task` at every h (at least three), reusing cached rows. A library
/// error at some h stops the sweep; rows computed so far are kept.
SweepReport sweep(const std::string& scenario, const std::vector<double>& hs, const SweepTask& task,
                  const SweepCache* cache = nullptr);

}  // namespace kornlab
