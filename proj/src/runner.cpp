#include "kornlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "kornlab/constructions.hpp"
#include "kornlab/errors.hpp"
#include "kornlab/forms.hpp"
#include "kornlab/spectra.hpp"

namespace kornlab {

namespace {

using nlohmann::json;

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string csv_number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

class Writer {
 public:
  explicit Writer(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  void json_file(const std::string& name, const json& j) {
    std::ofstream out(dir_ / name);
    out << j.dump(2) << '\n';
    written_.push_back(dir_ / name);
  }
  std::ofstream text_file(const std::string& name) {
    written_.push_back(dir_ / name);
    return std::ofstream(dir_ / name);
  }
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

ShellGrid shell_grid(const ExperimentConfig& c, double h) { return ShellGrid(c.shell(h), c.resolution); }

std::optional<KillingBasis> killing_for(const ExperimentConfig& c) {
  if (c.scenario.orthogonality != Orthogonality::Killing &&
      c.scenario.orthogonality != Orthogonality::ProfileKilling)
    return std::nullopt;
  return killing_basis(c.surface, c.resolution.n1, c.resolution.n2, c.killing);
}

json constant_json(const ConstantResult& r) {
  return {{"constant", num(r.constant)},
          {"lambda", num(r.lambda)},
          {"degenerate", r.degenerate},
          {"eigenvalues", vec(r.eig.eigenvalues)},
          {"residuals", vec(r.eig.residuals)},
          {"max_residual", num(r.eig.max_residual())},
          {"median", num(r.eig.median)},
          {"full_dim", r.full_dim},
          {"reduced_dim", r.reduced_dim},
          {"family_dim", r.family_dim}};
}

json korn_json(const ExperimentConfig& c, double h, const ConstantResult& r, const std::optional<KillingBasis>& kb) {
  json j = constant_json(r);
  j["h"] = h;
  j["tangency"] = to_string(c.scenario.tangency);
  j["orthogonality"] = to_string(c.scenario.orthogonality);
  j["alpha"] = c.scenario.alpha;
  if (kb) j["killing_dim"] = kb->dim();
  return j;
}

/// Killing field used by the counterexample: a tangent rigid field when S
/// has one (cheap at any resolution), otherwise the first Killing field.
Eigen::VectorXd counterexample_field(const ExperimentConfig& c, const SurfaceGrid& base) {
  const KillingBasis rigid = rigid_tangent_basis(base);
  if (rigid.dim() > 0) return rigid.fields.front();
  const KillingBasis kb = killing_basis(c.surface, c.resolution.n1, c.resolution.n2, c.killing);
  if (kb.dim() == 0) throw PreconditionError("surface " + c.surface.name() + " carries no Killing field");
  return kb.fields.front();
}

struct CounterexampleRow {
  double h, d_energy, grad_energy, quotient, residual_plus, residual_minus;
};

CounterexampleRow counterexample_row(const ExperimentConfig& c, double h, const Eigen::VectorXd& v) {
  const ShellGrid grid = shell_grid(c, h);
  const Eigen::VectorXd u = c.field == "extend" ? extend_killing(grid, v) : trivial_extension(grid, v);
  const ShellEnergies e = shell_energies(grid, u);
  const double q = e.sym > 0.0 ? std::sqrt(e.w12() / e.sym) : std::numeric_limits<double>::infinity();
  return {h, e.sym, e.grad, q, boundary_residual(grid, u, Tangency::Plus), boundary_residual(grid, u, Tangency::Minus)};
}

json fit_json(const std::vector<double>& h, const std::vector<double>& y) {
  if (h.size() < 3) return nullptr;
  const LogLogFit f = fit_loglog(h, y);
  return {{"slope", num(f.slope)}, {"residual", num(f.residual)}, {"reliable", f.reliable}};
}

json run_korn(const ExperimentConfig& c, Writer& w, json& timings) {
  Stopwatch sw;
  const auto kb = killing_for(c);
  if (kb) timings["killing"] = sw.lap();
  const ShellGrid grid = shell_grid(c, c.h);
  const ConstantResult r = korn_constant(grid, c.scenario, kb ? &*kb : nullptr);
  timings["solve"] = sw.lap();
  json j = korn_json(c, c.h, r, kb);
  w.json_file("summary.json", j);
  return j;
}

json run_killing(const ExperimentConfig& c, Writer& w, json& timings) {
  Stopwatch sw;
  const SurfaceGrid grid(c.surface, c.resolution.n1, c.resolution.n2);
  json j;
  const KillingBasis rigid = rigid_tangent_basis(grid);
  j["rigid_dim"] = rigid.dim();
  j["surface_dofs"] = grid.size() * (grid.ambient_dim() - 1);
  if (!c.surface.differentiable()) {
    // Quadrature-only surface: the identity is checked on the rotation about e_z.
    AmbientMat a = AmbientMat::Zero(3, 3);
    a(0, 1) = -1.0;
    a(1, 0) = 1.0;
    const BochnerResult b = bochner_check(grid, a, AmbientVec::Zero(3));
    j["dim"] = nullptr;
    j["eigenvalues"] = json::array();
    j["gap"] = nullptr;
    j["bochner"] = {{"lhs", b.lhs}, {"rhs", b.rhs}, {"relerr", b.relerr},
                    {"covariant_lhs", b.covariant_lhs}, {"covariant_rhs", b.covariant_rhs},
                    {"covariant_relerr", b.covariant_relerr}};
  } else {
    const KillingBasis kb = killing_basis(c.surface, c.resolution.n1, c.resolution.n2, c.killing);
    j["dim"] = kb.dim();
    j["eigenvalues"] = kb.eigenvalues;
    j["spectrum"] = kb.spectrum;
    j["gap"] = num(kb.gap);
    j["threshold"] = kb.threshold;
    j["median"] = kb.median;
    j["profile_dim"] = restrict_profile(grid, kb, c.profile).dim();
    json all = json::array();
    for (const Eigen::VectorXd& f : kb.fields) {
      const BochnerResult b = bochner_check(grid, f);
      json e = {{"lhs", b.lhs}, {"rhs", b.rhs}, {"relerr", b.relerr}};
      if (b.has_covariant)
        e.update({{"covariant_lhs", b.covariant_lhs}, {"covariant_rhs", b.covariant_rhs},
                  {"covariant_relerr", b.covariant_relerr}});
      all.push_back(e);
    }
    j["bochner"] = all.empty() ? json(nullptr) : all.front();
    j["bochner_all"] = all;
  }
  timings["solve"] = sw.lap();
  w.json_file("killing.json", j);
  return j;
}

json run_counterexample(const ExperimentConfig& c, Writer& w, json& timings) {
  Stopwatch sw;
  const SurfaceGrid base(c.surface, c.resolution.n1, c.resolution.n2);
  const Eigen::VectorXd v = counterexample_field(c, base);
  std::vector<CounterexampleRow> rows;
  for (double h : c.h_values()) rows.push_back(counterexample_row(c, h, v));
  timings["evaluate"] = sw.lap();

  auto out = w.text_file("counterexample.csv");
  out << "h,D_energy,grad_energy,quotient\n";
  std::vector<double> hs, d, g, q;
  json residuals = json::array();
  for (const auto& r : rows) {
    out << csv_number(r.h) << ',' << csv_number(r.d_energy) << ',' << csv_number(r.grad_energy) << ','
        << csv_number(r.quotient) << '\n';
    hs.push_back(r.h);
    d.push_back(r.d_energy);
    g.push_back(r.grad_energy);
    q.push_back(r.quotient);
    residuals.push_back({{"h", r.h}, {"plus", r.residual_plus}, {"minus", r.residual_minus}});
  }
  json j = {{"field", c.field},
            {"D_energy", fit_json(hs, d)},
            {"grad_energy", fit_json(hs, g)},
            {"quotient", fit_json(hs, q)},
            {"boundary_residuals", residuals}};
  w.json_file("summary.json", j);
  return j;
}

json run_lemmas(const ExperimentConfig& c, Writer& w, json& timings) {
  Stopwatch sw;
  static const std::vector<std::string> names = {"lem1", "lem2", "lem3", "ass_h2", "trivial_iv",
                                                 "trivial_v", "approx_i", "approx_ii"};
  auto out = w.text_file("lemmas.csv");
  out << "seed,h";
  for (const auto& n : names) out << ',' << n;
  out << ",w12_norm,sym_norm\n";
  std::vector<std::vector<double>> inv_h(names.size()), value(names.size());
  for (double h : c.h_values()) {
    const ShellGrid grid = shell_grid(c, h);
    for (std::uint64_t seed : c.seeds) {
      const Eigen::VectorXd u = sample_field(grid, seed, c.scenario.tangency);
      const LemmaRatios r = lemma_ratios(grid, u, c.scenario.tangency, c.mollifier);
      const double vals[] = {r.lem1, r.lem2, r.lem3, r.ass_h2, r.trivial_iv, r.trivial_v, r.approx_i, r.approx_ii};
      out << seed << ',' << csv_number(h);
      for (std::size_t k = 0; k < names.size(); ++k) {
        out << ',' << csv_number(vals[k]);
        if (std::isfinite(vals[k])) {
          inv_h[k].push_back(1.0 / h);
          value[k].push_back(vals[k]);
        }
      }
      out << ',' << csv_number(r.w12_norm) << ',' << csv_number(r.sym_norm) << '\n';
    }
  }
  timings["evaluate"] = sw.lap();
  json j = json::object();
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (value[k].empty()) {
      j[names[k]] = nullptr;
      continue;
    }
    const auto [lo, hi] = std::minmax_element(value[k].begin(), value[k].end());
    j[names[k]] = {{"max", *hi}, {"min", *lo}, {"kendall_tau", num(kendall_tau(inv_h[k], value[k]))}};
  }
  w.json_file("summary.json", j);
  return j;
}

json run_scalar(const ExperimentConfig& c, Writer& w, json& timings, bool poincare) {
  Stopwatch sw;
  const ShellGrid grid = shell_grid(c, c.h);
  const ConstantResult r = poincare ? poincare_constant(grid) : trace_constant(grid);
  timings["solve"] = sw.lap();
  json j = constant_json(r);
  j["h"] = c.h;
  w.json_file("summary.json", j);
  return j;
}

json run_sweep(const ExperimentConfig& c, Writer& w, json& timings) {
  Stopwatch sw;
  std::optional<KillingBasis> kb;
  std::optional<Eigen::VectorXd> field;
  if (c.sweep_task == Task::KornConstant) kb = killing_for(c);
  if (c.sweep_task == Task::Counterexample)
    field = counterexample_field(c, SurfaceGrid(c.surface, c.resolution.n1, c.resolution.n2));

  const SweepTask task = [&](double h) -> SweepRow {
    switch (c.sweep_task) {
      case Task::KornConstant: {
        const ConstantResult r = korn_constant(shell_grid(c, h), c.scenario, kb ? &*kb : nullptr);
        return {h, r.constant, korn_json(c, h, r, kb)};
      }
      case Task::Poincare:
      case Task::Trace: {
        const ShellGrid grid = shell_grid(c, h);
        const ConstantResult r = c.sweep_task == Task::Poincare ? poincare_constant(grid) : trace_constant(grid);
        return {h, r.constant, constant_json(r)};
      }
      default: {
        const CounterexampleRow r = counterexample_row(c, h, *field);
        return {h, r.quotient, {{"D_energy", r.d_energy}, {"grad_energy", r.grad_energy}}};
      }
    }
  };
  const SweepCache cache(SweepCache::default_root(), c.hash());
  const SweepReport report = sweep(to_string(c.sweep_task) + " on " + c.surface.name(), c.h_list, task, &cache);
  timings["sweep"] = sw.lap();

  auto out = w.text_file("sweep.csv");
  report.write_csv(out);
  out.close();
  const json j = report.summary();
  w.json_file("summary.json", j);
  if (!report.failure.empty()) throw Error(report.failure_kind, report.failure);
  return j;
}

std::string gflop(double n) {
  std::ostringstream s;
  s << std::setprecision(3) << (10.0 / 3.0) * n * n * n / 1e9 << " GFLOP";
  return s.str();
}

}  // namespace

json RunReport::to_json() const {
  json files = json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  return {{"config_hash", config_hash}, {"task", task},     {"outputs", files},
          {"summary", summary},         {"timings", timings}, {"version", version}};
}

RunReport run(const ExperimentConfig& c) {
  Writer w(c.output);
  RunReport report;
  report.config_hash = c.hash();
  report.task = to_string(c.task);
  Stopwatch total;
  w.json_file("config.json", c.normalized);
  switch (c.task) {
    case Task::KornConstant: report.summary = run_korn(c, w, report.timings); break;
    case Task::Killing: report.summary = run_killing(c, w, report.timings); break;
    case Task::Counterexample: report.summary = run_counterexample(c, w, report.timings); break;
    case Task::Lemmas: report.summary = run_lemmas(c, w, report.timings); break;
    case Task::Poincare: report.summary = run_scalar(c, w, report.timings, true); break;
    case Task::Trace: report.summary = run_scalar(c, w, report.timings, false); break;
    case Task::Sweep: report.summary = run_sweep(c, w, report.timings); break;
  }
  report.timings["total"] = total.lap();
  report.outputs = w.written();
  report.outputs.push_back(c.output / "report.json");
  std::ofstream(c.output / "report.json") << report.to_json().dump(2) << '\n';
  return report;
}

std::string describe(const ExperimentConfig& c) {
  std::ostringstream s;
  const int n = c.surface.ambient_dim();
  const Resolution& r = c.resolution;
  const bool curve = n == 2;
  const int kept1 = 2 * (r.n1 / 3) + 1;
  const int kept2 = curve ? 1 : 2 * (r.n2 / 3) + 1;
  const int surface_nodes = curve ? r.n1 : r.n1 * r.n2;

  s << "task: " << to_string(c.task) << "\n";
  s << "config hash: " << c.hash() << "\n";
  s << "surface: " << c.normalized["surface"].dump() << "\n";
  s << "profile: " << c.normalized["profile"].dump() << "\n";

  if (c.task == Task::Killing) {
    s << "surface grid: " << r.n1 << (curve ? "" : " x " + std::to_string(r.n2)) << " nodes\n";
    if (!c.surface.differentiable()) {
      s << "quadrature-only surface: rigid tangent fields and the curvature identity only\n";
      return s.str();
    }
    const int dofs = (n - 1) * surface_nodes;
    const int reduced = (n - 1) * kept1 * kept2;
    s << "surface DOFs: " << dofs << " (" << n - 1 << " frame coordinates per node)\n";
    s << "dealiased pencil dimension: " << reduced << ", dense cost ~ " << gflop(reduced) << "\n";
    return s.str();
  }

  if (c.scenario.orthogonality == Orthogonality::Killing || c.scenario.orthogonality == Orthogonality::ProfileKilling) {
    const int dofs = (n - 1) * surface_nodes;
    s << "first computes the Killing basis on the surface grid: pencil of " << dofs << " tangent DOFs ("
      << (n - 1) * kept1 * kept2 << " after dealiasing); its dimension fixes the W^h family size"
      << (c.scenario.orthogonality == Orthogonality::ProfileKilling ? ", then restricted to the profile" : "")
      << "\n";
  }
  const bool vector_task = c.task == Task::KornConstant || c.task == Task::Counterexample || c.task == Task::Lemmas ||
                           (c.task == Task::Sweep && (c.sweep_task == Task::KornConstant || c.sweep_task == Task::Counterexample));
  const int comps = vector_task ? n : 1;
  const int nodes = surface_nodes * r.nt;
  const bool eigensolve = c.task == Task::KornConstant || c.task == Task::Poincare || c.task == Task::Trace ||
                          (c.task == Task::Sweep && c.sweep_task != Task::Counterexample);
  // Tangency drops the n^h coordinate of each constrained boundary layer.
  int tangency_dropped = 0;
  if (comps == n && eigensolve) {
    if (constrains(c.scenario.tangency, Side::Minus)) tangency_dropped += kept1 * kept2;
    if (constrains(c.scenario.tangency, Side::Plus)) tangency_dropped += kept1 * kept2;
  }
  const int dealiased = kept1 * kept2 * r.nt * comps;
  for (double h : c.h_values()) {
    s << "h = " << h << ": grid " << r.n1 << (curve ? "" : " x " + std::to_string(r.n2)) << " x " << r.nt
      << ", nodes " << nodes << ", DOFs " << nodes * comps;
    if (eigensolve) {
      s << ", dealiased " << dealiased;
      if (tangency_dropped) s << ", tangency removes " << tangency_dropped;
      if (c.scenario.orthogonality == Orthogonality::Rigid && comps == n)
        s << ", rigid family <= " << n * (n + 1) / 2;
      const int reduced = dealiased - tangency_dropped;
      s << ", reduced ~" << reduced << ", dense cost ~ " << gflop(reduced);
      if (nodes * comps > kMaxDenseDofs) s << " (exceeds the dense limit of " << kMaxDenseDofs << " DOFs)";
    }
    s << "\n";
  }
  if (c.task == Task::Lemmas) s << "seeds: " << c.seeds.size() << "\n";
  return s.str();
}

}  // namespace kornlab
