#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <unistd.h>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "kornlab/constraints.hpp"
#include "kornlab/constructions.hpp"
#include "kornlab/eigensolver.hpp"
#include "kornlab/errors.hpp"
#include "kornlab/forms.hpp"
#include "kornlab/grid.hpp"
#include "kornlab/killing.hpp"
#include "kornlab/spectra.hpp"

namespace kornlab {
namespace {

constexpr double kPi = std::numbers::pi;

ShellGrid annulus(double h, int n1 = 32, int nt = 8) {
  return build_grid(ShellDomain(Hypersurface::circle(), {}, h), {n1, 0, nt});
}

ShellGrid ellipse(double h, int n1 = 32, int nt = 8) {
  return build_grid(ShellDomain(Hypersurface::ellipse(1.3, 0.8), {}, h), {n1, 0, nt});
}

Eigen::MatrixXd random_spd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  return g * g.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

// Lowest eigenvalues of the reduced pencil from a full generalized solve.
Eigen::VectorXd dense_oracle(const Pencil& p) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(p.a, p.b, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

TEST(SmallestEigenpairs, EqualFormsGiveUnitEigenvalues) {
  const Eigen::MatrixXd b = random_spd(40, 1);
  const EigenResult r = smallest_eigenpairs(b, b, 6);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.eigenvalues(i), 1.0, 1e-12);
  EXPECT_EQ(r.spectrum.size(), 40);
}

TEST(SmallestEigenpairs, ResidualsAndRayleighQuotients) {
  const Eigen::MatrixXd a = random_spd(60, 2);
  const Eigen::MatrixXd b = random_spd(60, 3);
  const EigenResult r = smallest_eigenpairs(a, b, 5);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd v = r.vectors.col(i);
    EXPECT_LT(r.residuals(i), 1e-8);
    EXPECT_NEAR(v.dot(a * v) / v.dot(b * v), r.eigenvalues(i), 1e-10 * r.eigenvalues(i));
    EXPECT_NEAR(v.dot(b * v), 1.0, 1e-10);
  }
  const Eigen::VectorXd oracle = Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>(a, b).eigenvalues();
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.eigenvalues(i), oracle(i), 1e-10 * oracle(i));
}

TEST(SmallestEigenpairs, IndefiniteMassIsAFormError) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(5, 5);
  b(2, 2) = -1.0;
  EXPECT_THROW(smallest_eigenpairs(Eigen::MatrixXd::Identity(5, 5), b, 2), FormError);
}

TEST(SmallestEigenpairs, CircleLaplacianApproachesTheAnalyticSpectrum) {
  // Periodic second differences against the trapezoidal mass on the unit
  // circle; the first nonzero eigenvalue tends to 1 (modes cos, sin).
  std::vector<double> err;
  for (int n : {64, 128, 256}) {
    const double dx = 2 * kPi / n;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      k(i, i) += 1 / dx;
      k(j, j) += 1 / dx;
      k(i, j) -= 1 / dx;
      k(j, i) -= 1 / dx;
    }
    const Eigen::MatrixXd m = dx * Eigen::MatrixXd::Identity(n, n);
    const EigenResult r = smallest_eigenpairs(k, m, 3);
    EXPECT_LT(r.eigenvalues(0), 1e-12);
    EXPECT_NEAR(r.eigenvalues(1), r.eigenvalues(2), 1e-10);
    err.push_back(std::abs(r.eigenvalues(1) - 1.0));
  }
  EXPECT_LT(err[2], err[1]);
  EXPECT_LT(err[1], err[0]);
  EXPECT_LT(err[2], 1e-4);
}

TEST(KornConstant, AnnulusRotationMakesThePencilDegenerate) {
  const ShellGrid g = annulus(0.2);
  const ConstantResult r = korn_constant(g, {Tangency::Both, Orthogonality::None});
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE(std::isinf(r.constant));
  // One-dimensional near-kernel: the rotation.
  EXPECT_LT(r.eig.eigenvalues(0), 1e-10 * r.eig.median);
  EXPECT_GT(r.eig.eigenvalues(1), 1e-4 * r.eig.median);
}

TEST(KornConstant, RigidOrthogonalityRestoresAFiniteConstant) {
  const ShellGrid g = annulus(0.2);
  const ConstantResult r = korn_constant(g, {Tangency::Both, Orthogonality::Rigid});
  EXPECT_FALSE(r.degenerate);
  EXPECT_TRUE(std::isfinite(r.constant));
  EXPECT_EQ(r.family_dim, 1);
  EXPECT_LT(r.eig.max_residual(), 1e-8);
}

TEST(KornConstant, ConstraintsNeverLowerTheBottomOfTheSpectrum) {
  const ShellGrid g = ellipse(0.2);
  const KillingBasis kb = killing_basis(Hypersurface::ellipse(1.3, 0.8), 32);
  double previous = 0.0;
  for (const ConstraintSpec& spec : {ConstraintSpec{Tangency::None, Orthogonality::None},
                                     ConstraintSpec{Tangency::Plus, Orthogonality::None},
                                     ConstraintSpec{Tangency::Both, Orthogonality::None},
                                     ConstraintSpec{Tangency::Both, Orthogonality::Killing}}) {
    const ConstantResult r = korn_constant(g, spec, &kb);
    EXPECT_GE(r.lambda, previous - 1e-12 * r.eig.median);
    EXPECT_LT(r.eig.max_residual(), 1e-8);
    previous = r.lambda;
  }
}

TEST(KornConstant, MinimizerLiesInTheSpaceAndAttainsTheQuotient) {
  const ShellGrid g = ellipse(0.2);
  const ConstantResult r = korn_constant(g, {Tangency::Both, Orthogonality::Killing});
  const ShellEnergies e = shell_energies(g, r.minimizer);
  EXPECT_NEAR(e.sym / e.w12(), r.lambda, 1e-10 * r.lambda);
  EXPECT_LT(boundary_residual(g, r.minimizer, Tangency::Both), 1e-12 * r.minimizer.cwiseAbs().maxCoeff());
  // Quotient homogeneity.
  const ShellEnergies scaled = shell_energies(g, -3.7 * r.minimizer);
  EXPECT_NEAR(scaled.sym / scaled.w12(), e.sym / e.w12(), 1e-12);
}

TEST(PoincareConstant, ConstantModeIsTheKernelAndMatchesTheOracle) {
  const ShellGrid g = annulus(0.2);
  const ConstantResult r = poincare_constant(g);
  EXPECT_LT(r.eig.eigenvalues(0), 1e-12);
  const Eigen::VectorXd oracle = dense_oracle(poincare_pencil(g));
  EXPECT_NEAR(r.lambda, oracle(1), 1e-8 * oracle(1));
  EXPECT_NEAR(r.constant, 1 / std::sqrt(oracle(1)), 1e-8 * r.constant);
}

TEST(TraceConstant, MatchesTheOracle) {
  const ShellGrid g = annulus(0.2);
  const ConstantResult r = trace_constant(g);
  const Eigen::VectorXd oracle = dense_oracle(trace_pencil(g));
  EXPECT_NEAR(r.constant, std::sqrt(-oracle(0)), 1e-8 * r.constant);
}

TEST(TraceConstant, FieldsVanishingOnTheBoundaryHaveNoTrace) {
  const ShellGrid g = annulus(0.2);
  const QuadraticFormSet f = assemble_scalar_forms(g);
  Eigen::VectorXd u(g.size());
  for (int i = 0; i < g.size(); ++i) u(i) = std::pow(std::sin(kPi * g.node(i).s), 2);
  EXPECT_LT(u.dot((f.trace_plus + f.trace_minus) * u), 1e-12);
}

TEST(LogLogFit, ExactPowerLaw) {
  const std::vector<double> h{0.2, 0.1, 0.05, 0.025};
  std::vector<double> v;
  for (double x : h) v.push_back(7 * x * x);
  const LogLogFit f = fit_loglog(h, v);
  EXPECT_NEAR(f.slope, 2.0, 1e-10);
  EXPECT_NEAR(std::exp(f.intercept), 7.0, 1e-10);
  EXPECT_LT(f.residual, 1e-12);
  EXPECT_TRUE(f.reliable);
}

TEST(LogLogFit, ScatteredDataIsUnreliable) {
  const LogLogFit f = fit_loglog({0.2, 0.1, 0.05}, {1.0, 2.0, 1.0});
  EXPECT_GT(f.residual, 0.05);
  EXPECT_FALSE(f.reliable);
}

TEST(LogLogFit, NeedsThreeRows) { EXPECT_THROW(fit_loglog({0.2, 0.1}, {1.0, 2.0}), PreconditionError); }

TEST(KendallTau, KnownValues) {
  EXPECT_NEAR(kendall_tau({1, 2, 3, 4}, {1, 3, 2, 4}), 4.0 / 6.0, 1e-15);
  EXPECT_NEAR(kendall_tau({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  // Tie in y: (2 concordant - 0) / sqrt(3 * 2).
  EXPECT_NEAR(kendall_tau({1, 2, 3}, {1, 1, 2}), 2.0 / std::sqrt(6.0), 1e-15);
}

class SweepTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = std::filesystem::temp_directory_path() / ("kornlab_sweep_" + std::to_string(::getpid()));
    std::filesystem::remove_all(root_);
  }
  void TearDown() override { std::filesystem::remove_all(root_); }
  std::filesystem::path root_;
};

TEST_F(SweepTest, SyntheticPowerLawAndCsv) {
  const SweepReport r = sweep("synthetic", {0.2, 0.1, 0.05}, [](double h) { return SweepRow{h, 7 * h * h}; });
  ASSERT_TRUE(r.fit.has_value());
  EXPECT_NEAR(r.fit->slope, 2.0, 1e-10);
  std::ostringstream csv;
  r.write_csv(csv);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "h,value,slope_so_far");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  const nlohmann::json s = r.summary();
  EXPECT_EQ(s["rows"].size(), 3u);
  EXPECT_TRUE(s.contains("slope"));
  EXPECT_TRUE(s.contains("residual"));
}

TEST_F(SweepTest, CachedRowsAreReused) {
  const SweepCache cache(root_, "abc");
  int calls = 0;
  auto task = [&](double h) {
    ++calls;
    return SweepRow{h, 1 / h, {{"note", "x"}}};
  };
  sweep("cached", {0.2, 0.1, 0.05}, task, &cache);
  EXPECT_EQ(calls, 3);
  EXPECT_TRUE(std::filesystem::exists(cache.path(0.1)));
  const SweepReport again = sweep("cached", {0.2, 0.1, 0.05}, task, &cache);
  EXPECT_EQ(calls, 3);
  EXPECT_EQ(again.rows[1].meta["note"], "x");
  // A different hash never sees these rows.
  const SweepCache other(root_, "abd");
  sweep("cached", {0.2, 0.1, 0.05}, task, &other);
  EXPECT_EQ(calls, 6);
}

TEST_F(SweepTest, FailureKeepsPartialRows) {
  const SweepReport r = sweep("failing", {0.2, 0.1, 0.05, 0.025}, [](double h) {
    if (h < 0.08) throw ResolutionError("too thin");
    return SweepRow{h, h};
  });
  EXPECT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.failure_kind, "resolution");
  EXPECT_FALSE(r.fit.has_value());
  EXPECT_THROW(sweep("short", {0.2, 0.1}, [](double h) { return SweepRow{h, h}; }), PreconditionError);
}

TEST_F(SweepTest, InfiniteValuesSurviveTheCache) {
  const SweepCache cache(root_, "inf");
  cache.store(SweepRow{0.1, std::numeric_limits<double>::infinity()});
  const auto row = cache.load(0.1);
  ASSERT_TRUE(row.has_value());
  EXPECT_TRUE(std::isinf(row->value));
}

}  // namespace
}  // namespace kornlab
