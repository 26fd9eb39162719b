#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "droplab/cli.hpp"
#include "droplab/errors.hpp"

namespace {

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = 0;
  bool seed_given = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config, "flat key = value configuration file");
  sub->add_option("--set", o.sets, "override a key: KEY=VALUE (repeatable)");
  sub->add_option("-o,--out", o.out, "output directory");
  sub->add_option_function<long long>(
      "--seed", [&o](long long s) { o.seed = s, o.seed_given = true; }, "base seed");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace droplab;
  CLI::App app{"Numerical experiments for liquid-drop energies with nonlocal perimeter"};
  app.require_subcommand(0, 1);
  bool list_keys = false;
  app.add_flag("--keys", list_keys, "list every configuration key with its default");

  Options o;
  const std::vector<std::pair<std::string, std::string>> help = {
      {"energy", "evaluate the energy terms of a shape"},
      {"critical-mass", "closed-form or root-found critical mass"},
      {"slice-scan", "splitting defect over cuts, plus the averaged mass bound"},
      {"family", "two-ball split search, subadditivity probe or voxel local search"},
      {"verify", "identity, isoperimetry, scaling and sphere-integral checks"},
      {"kernel-check", "sample the kernel conditions"}};
  for (const auto& [name, text] : help) add_common(app.add_subcommand(name, text), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::config_error;
  }

  if (list_keys) {
    for (const auto& k : cli::documented_keys())
      std::cout << k.name << " = " << k.fallback << "    # " << k.doc << "\n";
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return cli::config_error;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  cli::ExperimentConfig config;
  try {
    if (!o.config.empty()) config = cli::ExperimentConfig::load(o.config);
    for (const auto& kv : o.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.out.empty()) config.set("out", o.out);
    if (o.seed_given) config.set("seed", std::to_string(o.seed));
  } catch (const std::exception& e) {
    const nlohmann::ordered_json j = {{"schema_version", cli::kSchemaVersion},
                                      {"subcommand", sub},
                                      {"status", "error"},
                                      {"exit_code", cli::config_error},
                                      {"error", {{"type", dynamic_cast<const PathError*>(&e) ? "PathError" : "ConfigError"}, {"message", e.what()}}}};
    std::cerr << j.dump() << "\n";
    return cli::config_error;
  }
  return cli::run(sub, config, std::cout, std::cerr);
}
