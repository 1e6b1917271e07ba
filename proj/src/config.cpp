#include "kornlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <openssl/evp.h>

#include "kornlab/errors.hpp"

namespace kornlab {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("'" + path + "' must be an object", path);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  check_object(j, path);
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + join(path, key) + "'", join(path, key));
}

double number(const json& j, const std::string& key, const std::string& path, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("'" + join(path, key) + "' must be a number", join(path, key));
  return j[key].get<double>();
}

double positive(const json& j, const std::string& key, const std::string& path, double fallback) {
  const double v = number(j, key, path, fallback);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError("'" + join(path, key) + "' must be positive", join(path, key));
  return v;
}

int integer(const json& j, const std::string& key, const std::string& path, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError("'" + join(path, key) + "' must be an integer", join(path, key));
  return j[key].get<int>();
}

std::string text(const json& j, const std::string& key, const std::string& path, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError("'" + join(path, key) + "' must be a string", join(path, key));
  return j[key].get<std::string>();
}

// Re-raises a nested ConfigError with the full key path.
template <class F>
auto at_key(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), key);
  }
}

ProfileExpr parse_expr(const json& j, const Hypersurface& surface, const std::string& path, json& out) {
  check_object(j, path);
  if (j.size() != 1) throw ConfigError("'" + path + "' must hold exactly one of 'const' or 'cos'", path);
  if (j.contains("const")) {
    const double c = positive(j, "const", path, 1.0);
    out = {{"const", c}};
    return ProfileExpr::constant(c);
  }
  if (!j.contains("cos")) throw ConfigError("unknown key '" + join(path, j.begin().key()) + "'", join(path, j.begin().key()));
  const std::string cpath = join(path, "cos");
  const json& c = j["cos"];
  check_keys(c, {"amp", "mode", "param", "base"}, cpath);
  const double amp = number(c, "amp", cpath, 0.0);
  const int mode = integer(c, "mode", cpath, 1);
  const double base = number(c, "base", cpath, 1.0);
  const std::string param = text(c, "param", cpath, surface.ambient_dim() == 2 ? "theta" : "phi");
  const int index = at_key(join(cpath, "param"), [&] { return surface.param_index(param); });
  if (!(base - std::abs(amp) > 0.0))
    throw ConfigError("'" + path + "' is not positive everywhere (need base > |amp|)", path);
  out = {{"cos", {{"amp", amp}, {"mode", mode}, {"param", param}, {"base", base}}}};
  return ProfileExpr::cosine(base, amp, mode, index);
}

std::vector<double> h_array(const json& j, const std::string& key) {
  if (!j[key].is_array()) throw ConfigError("'" + key + "' must be an array of numbers", key);
  std::vector<double> out;
  for (const json& v : j[key]) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("'" + key + "' entries must be positive numbers", key);
    out.push_back(v.get<double>());
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

json surface_json(const Hypersurface& s) {
  switch (s.kind()) {
    case SurfaceKind::Circle:
    case SurfaceKind::Sphere: return {{"kind", s.name()}, {"radius", s.a()}};
    case SurfaceKind::Ellipse: return {{"kind", s.name()}, {"a", s.a()}, {"b", s.b()}};
    case SurfaceKind::Torus: return {{"kind", s.name()}, {"R_maj", s.a()}, {"r_min", s.b()}};
    case SurfaceKind::BumpyTorus:
      return {{"kind", s.name()}, {"R_maj", s.a()}, {"r_min", s.b()}, {"eps", s.eps()}, {"mode", s.mode()}};
  }
  return {};
}

}  // namespace

Task parse_task(const std::string& s) {
  if (s == "korn-constant") return Task::KornConstant;
  if (s == "killing") return Task::Killing;
  if (s == "counterexample") return Task::Counterexample;
  if (s == "lemmas") return Task::Lemmas;
  if (s == "poincare") return Task::Poincare;
  if (s == "trace") return Task::Trace;
  if (s == "sweep") return Task::Sweep;
  throw ConfigError("unknown task '" + s + "'", "task");
}

std::string to_string(Task t) {
  switch (t) {
    case Task::KornConstant: return "korn-constant";
    case Task::Killing: return "killing";
    case Task::Counterexample: return "counterexample";
    case Task::Lemmas: return "lemmas";
    case Task::Poincare: return "poincare";
    case Task::Trace: return "trace";
    case Task::Sweep: return "sweep";
  }
  return "unknown";
}

Hypersurface parse_surface(const json& j) {
  check_object(j, "surface");
  const std::string kind = text(j, "kind", "surface", "");
  if (kind.empty()) throw ConfigError("'surface.kind' is required", "surface.kind");
  if (kind == "circle" || kind == "sphere") {
    check_keys(j, {"kind", "radius"}, "surface");
    const double r = positive(j, "radius", "surface", 1.0);
    return kind == "circle" ? Hypersurface::circle(r) : Hypersurface::sphere(r);
  }
  if (kind == "ellipse") {
    check_keys(j, {"kind", "a", "b"}, "surface");
    return Hypersurface::ellipse(positive(j, "a", "surface", 1.3), positive(j, "b", "surface", 0.8));
  }
  if (kind == "torus") {
    check_keys(j, {"kind", "R_maj", "r_min"}, "surface");
    return at_key("surface", [&] {
      return Hypersurface::torus(positive(j, "R_maj", "surface", 2.0), positive(j, "r_min", "surface", 1.0));
    });
  }
  if (kind == "bumpy-torus") {
    check_keys(j, {"kind", "R_maj", "r_min", "eps", "mode"}, "surface");
    return at_key("surface", [&] {
      return Hypersurface::bumpy_torus(positive(j, "R_maj", "surface", 2.0), positive(j, "r_min", "surface", 1.0),
                                       number(j, "eps", "surface", 0.15), integer(j, "mode", "surface", 3));
    });
  }
  throw ConfigError("unknown surface kind '" + kind + "'", "surface.kind");
}

ThicknessProfile parse_profile(const json& j, const Hypersurface& surface) {
  json ignored;
  ThicknessProfile p;
  check_keys(j, {"g1", "g2", "regime", "h1_growth"}, "profile");
  if (j.contains("g1")) p.g1 = parse_expr(j["g1"], surface, "profile.g1", ignored);
  if (j.contains("g2")) p.g2 = parse_expr(j["g2"], surface, "profile.g2", ignored);
  const std::string regime = text(j, "regime", "profile", "H2");
  if (regime == "H1") p.regime = Regime::H1;
  else if (regime != "H2") throw ConfigError("unknown regime '" + regime + "'", "profile.regime");
  if (j.contains("h1_growth")) {
    const json& g = j["h1_growth"];
    if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number())
      throw ConfigError("'profile.h1_growth' must be two numbers", "profile.h1_growth");
    p.h1_growth = {g[0].get<double>(), g[1].get<double>()};
  }
  return p;
}

std::string ExperimentConfig::hash() const {
  json copy = normalized;
  copy.erase("output");
  return sha256_hex(copy.dump());
}

ShellDomain ExperimentConfig::shell(double h_value) const { return ShellDomain(surface, profile, h_value); }

std::vector<double> ExperimentConfig::h_values() const {
  if (!h_list.empty() && (task == Task::Sweep || task == Task::Counterexample || task == Task::Lemmas))
    return h_list;
  return {h};
}

ExperimentConfig parse_config(const json& j) {
  check_keys(j, {"task", "surface", "profile", "h", "resolution", "scenario", "h_list", "seeds", "field",
                 "sweep_task", "killing", "mollifier", "output"},
             "");
  ExperimentConfig c;
  json& n = c.normalized;
  n = json::object();

  if (!j.contains("task")) throw ConfigError("'task' is required", "task");
  c.task = parse_task(text(j, "task", "", ""));
  n["task"] = to_string(c.task);

  if (!j.contains("surface")) throw ConfigError("'surface' is required", "surface");
  c.surface = parse_surface(j["surface"]);
  n["surface"] = surface_json(c.surface);

  // Profile, normalized expression by expression.
  const json profile = j.value("profile", json::object());
  c.profile = parse_profile(profile, c.surface);
  json np = json::object();
  for (const char* key : {"g1", "g2"}) {
    json expr;
    parse_expr(profile.value(key, json{{"const", 1.0}}), c.surface, std::string("profile.") + key, expr);
    np[key] = expr;
  }
  np["regime"] = c.profile.regime == Regime::H1 ? "H1" : "H2";
  np["h1_growth"] = c.profile.h1_growth;
  n["profile"] = np;

  c.has_h = j.contains("h");
  c.h = positive(j, "h", "", 0.1);
  if (c.has_h) n["h"] = c.h;

  const json res = j.value("resolution", json::object());
  check_keys(res, {"n1", "n2", "nt"}, "resolution");
  const bool surface3 = c.surface.ambient_dim() == 3;
  const int d1 = surface3 ? (c.surface.kind() == SurfaceKind::Sphere ? 128 : 24) : 64;
  c.resolution.n1 = integer(res, "n1", "resolution", d1);
  c.resolution.n2 = integer(res, "n2", "resolution", surface3 ? 2 * c.resolution.n1 : 0);
  c.resolution.nt = integer(res, "nt", "resolution", 12);
  if (c.resolution.n1 < 8 || c.resolution.nt < 8 || (surface3 && c.resolution.n2 < 8))
    throw ConfigError("resolutions below 8 nodes per direction are rejected", "resolution");
  if (!surface3 && c.resolution.n2 != 0) throw ConfigError("'resolution.n2' applies only to surfaces in R^3", "resolution.n2");
  n["resolution"] = {{"n1", c.resolution.n1}, {"n2", c.resolution.n2}, {"nt", c.resolution.nt}};

  const json sc = j.value("scenario", json::object());
  check_keys(sc, {"tangency", "orthogonality", "alpha"}, "scenario");
  c.scenario.tangency = at_key("scenario.tangency", [&] { return parse_tangency(text(sc, "tangency", "scenario", "both")); });
  c.scenario.orthogonality =
      at_key("scenario.orthogonality", [&] { return parse_orthogonality(text(sc, "orthogonality", "scenario", "none")); });
  c.scenario.alpha = number(sc, "alpha", "scenario", 0.0);
  at_key("scenario.alpha", [&] { c.scenario.validate(); return 0; });
  n["scenario"] = {{"tangency", to_string(c.scenario.tangency)},
                   {"orthogonality", to_string(c.scenario.orthogonality)},
                   {"alpha", c.scenario.alpha}};

  if (j.contains("h_list")) {
    c.h_list = h_array(j, "h_list");
    n["h_list"] = c.h_list;
  }
  if (c.task == Task::Sweep && c.h_list.size() < 3)
    throw ConfigError("a sweep needs 'h_list' with at least three entries", "h_list");
  const bool listed = c.task == Task::Counterexample || c.task == Task::Lemmas || c.task == Task::Sweep;
  if (c.task != Task::Killing && !c.has_h && !(listed && !c.h_list.empty()))
    throw ConfigError("'h' is required for task " + to_string(c.task), "h");

  if (j.contains("seeds")) {
    if (!j["seeds"].is_array() || j["seeds"].empty()) throw ConfigError("'seeds' must be a non-empty array", "seeds");
    for (const json& s : j["seeds"]) {
      if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
        throw ConfigError("'seeds' entries must be non-negative integers", "seeds");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    c.seeds = {1, 2, 3, 4, 5};
  }
  n["seeds"] = c.seeds;

  c.field = text(j, "field", "", "extend");
  if (c.field != "extend" && c.field != "trivial") throw ConfigError("unknown field '" + c.field + "'", "field");
  n["field"] = c.field;

  c.sweep_task = parse_task(text(j, "sweep_task", "", "korn-constant"));
  if (c.sweep_task == Task::Sweep || c.sweep_task == Task::Killing || c.sweep_task == Task::Lemmas)
    throw ConfigError("'sweep_task' must be korn-constant, poincare, trace or counterexample", "sweep_task");
  n["sweep_task"] = to_string(c.sweep_task);

  const json k = j.value("killing", json::object());
  check_keys(k, {"threshold", "gap", "probe"}, "killing");
  c.killing.relative_threshold = positive(k, "threshold", "killing", c.killing.relative_threshold);
  c.killing.gap = positive(k, "gap", "killing", c.killing.gap);
  c.killing.probe = integer(k, "probe", "killing", c.killing.probe);
  if (c.killing.probe < 1) throw ConfigError("'killing.probe' must be at least 1", "killing.probe");
  n["killing"] = {{"threshold", c.killing.relative_threshold}, {"gap", c.killing.gap}, {"probe", c.killing.probe}};

  const json m = j.value("mollifier", json::object());
  check_keys(m, {"radius_multiple"}, "mollifier");
  c.mollifier.radius_multiple = positive(m, "radius_multiple", "mollifier", 1.0);
  n["mollifier"] = {{"radius_multiple", c.mollifier.radius_multiple}};

  c.output = text(j, "output", "", "out");
  n["output"] = c.output.string();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "config");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "config");
  }
  return parse_config(j);
}

}  // namespace kornlab
