#include "commands.hpp"
#include "config.hpp"

#include "railyard/error.hpp"
#include "railyard/schur_process.hpp"
#include "railyard/spec.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace railyard;
  using namespace railyard::cli;

  CLI::App app{"railyard: dimer coverings of rail-yard graphs and their limit shapes"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> cap, threads;
  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "random seed (overrides task.seed)");
  app.add_option("--cap", cap, "Fock-space truncation cap (overrides task.cap)");
  app.add_option("--threads", threads, "worker threads (default: RAILYARD_THREADS or all cores)");
  const char* const commands[][2] = {
      {"z", "partition function by transfer matrices and by the product formula"},
      {"sample", "exact samples and empirical column measures"},
      {"moments", "limit moments at the configured column"},
      {"density", "limit density on a kappa grid"},
      {"frozen", "frozen boundary for a staircase boundary"},
      {"frozen-piecewise", "frozen boundary components for a piecewise boundary"},
      {"verify", "oracle and property checks on the configured model"}};
  for (const auto& c : commands) app.add_subcommand(c[0], c[1])->fallthrough();
  app.fallthrough();
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.task.seed = *seed;
    if (cap) cfg.task.cap = *cap;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    RunOptions opts{cfg.out_dir, threads ? *threads : default_threads()};
    if (opts.threads < 1) throw ConfigError("--threads must be positive");
    return run_command(app.get_subcommands().front()->get_name(), cfg, opts, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
}
