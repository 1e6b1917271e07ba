#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "kornlab/errors.hpp"
#include "kornlab/spectra.hpp"

namespace kornlab {

namespace {

// JSON has no infinity; non-finite numbers travel as strings.
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double from_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

std::string shortest(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json fit_json(const LogLogFit& fit) {
  return {{"slope", number(fit.slope)},
          {"intercept", number(fit.intercept)},
          {"residual", number(fit.residual)},
          {"reliable", fit.reliable}};
}

std::vector<double> column(const std::vector<SweepRow>& rows, bool values) {
  std::vector<double> out;
  for (const SweepRow& r : rows) out.push_back(values ? r.value : r.h);
  return out;
}

}  // namespace

nlohmann::json SweepReport::summary() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const SweepRow& r : rows) rows_json.push_back({{"h", r.h}, {"value", number(r.value)}, {"meta", r.meta}});
  nlohmann::json j = {{"scenario", scenario}, {"rows", rows_json}};
  if (fit) {
    j["slope"] = number(fit->slope);
    j["residual"] = number(fit->residual);
    j["reliable"] = fit->reliable;
    j["fit"] = fit_json(*fit);
  } else {
    j["slope"] = nullptr;
    j["residual"] = nullptr;
  }
  if (!failure.empty()) j["failure"] = {{"kind", failure_kind}, {"message", failure}};
  return j;
}

void SweepReport::write_csv(std::ostream& out) const {
  out << "h,value,slope_so_far\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << shortest(rows[i].h) << ',' << shortest(rows[i].value) << ',';
    if (i >= 2) {
      const std::vector<SweepRow> head(rows.begin(), rows.begin() + static_cast<long>(i) + 1);
      out << shortest(fit_loglog(column(head, false), column(head, true)).slope);
    }
    out << '\n';
  }
}

SweepCache::SweepCache(std::filesystem::path root, std::string config_hash)
    : dir_(std::move(root) / std::move(config_hash)) {}

std::filesystem::path SweepCache::default_root() {
  if (const char* env = std::getenv("KORNLAB_CACHE"); env && *env) return env;
  return "cache";
}

std::filesystem::path SweepCache::path(double h) const { return dir_ / (shortest(h) + ".json"); }

std::optional<SweepRow> SweepCache::load(double h) const {
  std::ifstream in(path(h));
  if (!in) return std::nullopt;
  const nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("value") || j.value("h", -1.0) != h) return std::nullopt;
  return SweepRow{h, from_number(j["value"]), j.value("meta", nlohmann::json::object())};
}

void SweepCache::store(const SweepRow& row) const {
  std::filesystem::create_directories(dir_);
  const std::filesystem::path target = path(row.h);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << nlohmann::json{{"h", row.h}, {"value", number(row.value)}, {"meta", row.meta}}.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, target);
}

SweepReport sweep(const std::string& scenario, const std::vector<double>& hs, const SweepTask& task,
                  const SweepCache* cache) {
  if (hs.size() < 3) throw PreconditionError("a sweep needs at least three values of h");
  SweepReport report;
  report.scenario = scenario;
  for (double h : hs) {
    if (cache) {
      if (auto row = cache->load(h)) {
        report.rows.push_back(std::move(*row));
        continue;
      }
    }
    try {
      SweepRow row = task(h);
      row.h = h;
      if (cache) cache->store(row);
      report.rows.push_back(std::move(row));
    } catch (const Error& e) {
      report.failure_kind = e.kind();
      report.failure = e.what();
      break;
    }
  }
  if (report.rows.size() >= 3)
    report.fit = fit_loglog(column(report.rows, false), column(report.rows, true));
  return report;
}

}  // namespace kornlab
