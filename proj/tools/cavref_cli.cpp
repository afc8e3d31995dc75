// Command-line front end for the experiment runners.

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "cavref/harness/experiments.hpp"

namespace {

enum ExitCode { exit_pass = 0, exit_numeric = 1, exit_config = 2, exit_io = 3 };

constexpr const char* out_dir_env = "CAVREF_OUT_DIR";

}  // namespace

int main(int argc, char** argv) {
  using namespace cavref::harness;
  CLI::App app{"Single-photon reflection from a cavity with dipole-coupled emitters"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  std::size_t traj = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "key = value configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* traj_opt = app.add_option("--traj", traj, "number of trajectories")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, std::string("output directory (default: $") + out_dir_env + " or results)");
  app.add_flag("--quiet", quiet, "suppress the summary");
  for (const char* verb : {"fig2b", "oracle-compare", "gate-demo", "sweep", "ensemble"}) app.add_subcommand(verb);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_pass : exit_config;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.experiment = app.get_subcommands().front()->get_name();
    if (*seed_opt) cfg.seed = seed;
    if (*traj_opt) cfg.n_traj = traj;
    if (out_dir.empty()) out_dir = cfg.out_dir;
    if (out_dir.empty()) {
      const char* env = std::getenv(out_dir_env);
      out_dir = env ? env : "results";
    }

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentResult res = run_experiment(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const ResultManifest m = write_outputs(cfg, res, out_dir, wall);
    if (!quiet) {
      for (const auto& v : res.verdicts) std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << v.name << ": " << v.detail << '\n';
      for (const auto& f : m.files) std::cout << "wrote " << out_dir << '/' << f.path << '\n';
    }
    return res.all_pass() ? exit_pass : exit_numeric;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numeric;
  }
}
