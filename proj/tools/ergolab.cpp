#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ergolab/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CliArgs {
  std::string config_path;
  std::int64_t seed = -1;
  int workers = -1;
  std::string out_prefix;
};

int run_one(const std::string& experiment, const CliArgs& args) {
  std::ifstream is(args.config_path);
  if (!is) {
    std::cerr << "error: cannot read config file: " << args.config_path << '\n';
    return kExitConfigError;
  }
  std::stringstream buf;
  buf << is.rdbuf();

  nlohmann::json raw;
  try {
    raw = nlohmann::json::parse(buf.str());
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  if (!raw.is_object()) {
    std::cerr << "config error: root must be a JSON object\n";
    return kExitConfigError;
  }
  if (!raw.contains("experiment")) {
    raw["experiment"] = experiment;
  } else if (raw["experiment"] != experiment) {
    std::cerr << "config error: config names experiment '"
              << raw["experiment"].get<std::string>()
              << "' but the subcommand is '" << experiment << "'\n";
    return kExitConfigError;
  }
  // CLI overrides become part of the echoed config.
  if (args.seed >= 0) raw["seed"] = static_cast<std::uint64_t>(args.seed);
  if (args.workers >= 0) raw["workers"] = args.workers;
  if (!args.out_prefix.empty()) raw["output"] = args.out_prefix;

  const auto validated = ergolab::runner::validate_config(raw);
  if (!validated.ok) {
    std::cerr << "config error(s):\n";
    for (const auto& e : validated.errors) std::cerr << "  - " << e << '\n';
    return kExitConfigError;
  }

  try {
    const auto table = ergolab::runner::run_experiment(*validated.config);
    const auto& prefix = validated.config->out_prefix;
    if (prefix.empty()) {
      std::cout << table.to_csv();
    } else {
      const auto paths = ergolab::runner::emit(table, prefix);
      std::cout << "wrote " << paths.csv << " and " << paths.json << " ("
                << table.rows().size() << " rows)\n";
    }
    std::cerr << "wall time: " << table.wall_time() << " s\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "runtime error [" << experiment << "]: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ergolab - desk-scale experiments on ergodic averages of dilated "
      "measures"};
  app.require_subcommand(1);

  CliArgs args;
  std::string chosen;
  for (const auto& name : ergolab::runner::experiment_names()) {
    auto* sub = app.add_subcommand(
        name, std::string("run the '") + name + "' experiment");
    sub->add_option("--config", args.config_path, "JSON config file")
        ->required();
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--workers", args.workers,
                    "worker threads (results are identical for any count)");
    sub->add_option("--out", args.out_prefix,
                    "output path prefix (<prefix>.csv, <prefix>.json)");
    sub->callback([&chosen, name]() { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  return run_one(chosen, args);
}
