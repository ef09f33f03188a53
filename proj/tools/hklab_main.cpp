#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "runner/runner.hpp"

namespace {

std::size_t threads_from_env() {
  const char* v = std::getenv("HKLAB_THREADS");
  if (!v || !*v) return 1;
  try {
    const long n = std::stol(v);
    return n > 0 ? static_cast<std::size_t>(n) : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hklab::cli;
  CLI::App app{"Heat-kernel experiments on long-range conductance models"};
  app.require_subcommand(1);

  RunOptions options;
  options.threads = threads_from_env();
  std::string config_path, report_path, op_name, out_dir;
  std::uint64_t seed = 0;
  double tolerance_scale = 1.0;
  std::size_t threads = 0;

  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads for simulations (overrides HKLAB_THREADS)")
        ->check(CLI::PositiveNumber);
  };

  auto* run_cmd = app.add_subcommand("run", "run the tasks of a config file");
  run_cmd->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  auto* out_opt = run_cmd->add_option("--out", out_dir, "output directory (default: config output_dir, else out)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config seed");
  auto* scale_opt = run_cmd->add_option("--tolerance-scale", tolerance_scale, "multiplier for caps and sigma bands")
                        ->check(CLI::PositiveNumber);
  add_threads(run_cmd);

  auto* replay_cmd = app.add_subcommand("replay", "re-run a report's config and compare");
  replay_cmd->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  add_threads(replay_cmd);

  auto* models_cmd = app.add_subcommand("list-models", "list conductance model kinds");
  auto* ops_cmd = app.add_subcommand("list-ops", "list experiment ops");
  auto* describe_cmd = app.add_subcommand("describe-op", "show an op's parameters");
  describe_cmd->add_option("op", op_name, "op name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) options.threads = threads;
  if (*out_opt) options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  if (*scale_opt) options.tolerance_scale = tolerance_scale;

  try {
    if (*run_cmd) return run(config_path, options, std::cout);
    if (*replay_cmd) return replay(report_path, options, std::cout);
    if (*models_cmd) {
      list_models(std::cout);
      return 0;
    }
    if (*ops_cmd) {
      list_ops(std::cout);
      return 0;
    }
    if (*describe_cmd) {
      const int code = describe_op(op_name, std::cout);
      if (code != 0) std::cerr << "unknown op '" << op_name << "'\n";
      return code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
