// Command-line front end. Named subcommands build a config and hand it to
// the same runner as `run`.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kornlab/config.hpp"
#include "kornlab/errors.hpp"
#include "kornlab/runner.hpp"

namespace {

using nlohmann::json;
using namespace kornlab;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void report_error(const std::string& kind, const std::string& message, const std::string& key = {}) {
  json j = {{"error", kind}, {"message", message}};
  if (!key.empty()) j["key"] = key;
  std::cerr << j.dump() << std::endl;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

double to_number(const std::string& s, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot read '" + s + "' as a number", flag);
}

json number_list(const std::string& s, const std::string& flag, bool integers) {
  json a = json::array();
  for (const std::string& item : split(s, ',')) {
    const double v = to_number(item, flag);
    if (integers) {
      if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
        throw ConfigError("'" + item + "' is not a non-negative integer", flag);
      a.push_back(static_cast<std::uint64_t>(v));
    } else {
      a.push_back(v);
    }
  }
  return a;
}

/// "N", "N1xNT" (curves), "N1xN2" or "N1xN2xNT" (surfaces in R^3).
json resolution_json(const std::string& s, int ambient_dim) {
  const std::vector<std::string> parts = split(s, 'x');
  std::vector<int> v;
  for (const std::string& p : parts) v.push_back(static_cast<int>(to_number(p, "resolution")));
  json r = json::object();
  if (v.empty() || v.size() > 3 || (ambient_dim == 2 && v.size() == 3))
    throw ConfigError("resolution '" + s + "' does not fit a surface in R^" + std::to_string(ambient_dim), "resolution");
  r["n1"] = v[0];
  if (ambient_dim == 2) {
    if (v.size() == 2) r["nt"] = v[1];
  } else {
    if (v.size() >= 2) r["n2"] = v[1];
    if (v.size() == 3) r["nt"] = v[2];
  }
  return r;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'", "surface-config");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("'") + path + "' is not valid JSON: " + e.what(), "surface-config");
  }
}

/// Options shared by the shorthand subcommands.
struct Shorthand {
  std::string surface_config;
  std::string resolution;
  std::string h;
  std::string h_list;
  std::string tangency;
  std::string orthogonality;
  double alpha = 0.0;
  std::string field;
  std::string seeds;
  std::string quantity;
  std::string output = "out";

  json build(const std::string& task) const {
    json surface = read_json(surface_config);
    json config = {{"task", task}, {"output", output}};
    for (const char* key : {"surface", "profile", "h"})
      if (surface.contains(key)) config[key] = surface[key];
    for (const auto& [key, value] : surface.items())
      if (key != "surface" && key != "profile" && key != "h")
        throw ConfigError("unknown key '" + key + "' in surface config", key);
    if (!config.contains("surface")) throw ConfigError("surface config lacks 'surface'", "surface");
    const int dim = parse_surface(config["surface"]).ambient_dim();
    if (!resolution.empty()) config["resolution"] = resolution_json(resolution, dim);
    if (!h.empty()) config["h"] = to_number(h, "h");
    if (!h_list.empty()) config["h_list"] = number_list(h_list, "h-list", false);
    json scenario = json::object();
    if (!tangency.empty()) scenario["tangency"] = tangency;
    if (!orthogonality.empty()) scenario["orthogonality"] = orthogonality;
    if (alpha != 0.0) scenario["alpha"] = alpha;
    if (!scenario.empty()) config["scenario"] = scenario;
    if (!field.empty()) config["field"] = field;
    if (!seeds.empty()) config["seeds"] = number_list(seeds, "seeds", true);
    if (!quantity.empty()) config["sweep_task"] = quantity;
    return config;
  }
};

int execute(const ExperimentConfig& config) {
  const RunReport report = run(config);
  std::cout << report.to_json().dump(2) << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Korn-Poincare numerical lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kornlab::kVersion));

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();
  auto* describe_cmd = app.add_subcommand("describe", "Print the plan of a config without solving");
  describe_cmd->add_option("config", config_path, "Experiment config (JSON)")->required();

  Shorthand opts;
  struct Named {
    const char* name;
    const char* help;
  };
  const std::vector<Named> named = {
      {"korn-constant", "Korn constant C_h of one shell"},
      {"killing", "Killing fields of a surface and the curvature identity"},
      {"counterexample", "Energies of the Killing extension over a list of h"},
      {"lemmas", "Lemma ratio suite on seeded admissible fields"},
      {"poincare", "Uniform Poincare constant of one shell"},
      {"trace", "Uniform trace constant of one shell"},
      {"sweep", "h-sweep of a scalar quantity with a log-log fit"},
  };
  std::vector<CLI::App*> shorthands;
  for (const Named& n : named) {
    CLI::App* sub = app.add_subcommand(n.name, n.help);
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--surface-config", opts.surface_config, "JSON with surface, profile and h")->required();
    sub->add_option("--resolution", opts.resolution, "N, N1xNT, N1xN2 or N1xN2xNT");
    sub->add_option("--output", opts.output, "Output directory");
    const std::string name = n.name;
    if (name != "killing") sub->add_option("--h", opts.h, "Half-thickness scale");
    if (name == "counterexample" || name == "lemmas" || name == "sweep")
      sub->add_option("--h-list", opts.h_list, "Comma-separated h values");
    if (name == "korn-constant" || name == "lemmas" || name == "sweep")
      sub->add_option("--tangency", opts.tangency, "none | plus | minus | both");
    if (name == "korn-constant" || name == "sweep") {
      sub->add_option("--orthogonality", opts.orthogonality, "none | rigid | killing | profile-killing");
      sub->add_option("--alpha", opts.alpha, "Cone parameter (recorded; alpha = 0 is enforced)");
    }
    if (name == "counterexample" || name == "sweep") sub->add_option("--field", opts.field, "extend | trivial");
    if (name == "lemmas") sub->add_option("--seeds", opts.seeds, "Comma-separated seeds");
    if (name == "sweep")
      sub->add_option("--quantity", opts.quantity, "korn-constant | poincare | trace | counterexample");
    shorthands.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return kExitConfig;
  }

  try {
    if (*run_cmd) return execute(load_config(config_path));
    if (*describe_cmd) {
      std::cout << describe(load_config(config_path));
      return 0;
    }
    for (CLI::App* sub : shorthands)
      if (*sub) return execute(parse_config(opts.build(sub->get_name())));
  } catch (const ConfigError& e) {
    report_error(e.kind(), e.what(), e.key());
    return kExitConfig;
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return kExitNumerical;
  }
  return 0;
}
