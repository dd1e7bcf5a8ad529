#include "qwork/commands.hpp"
#include "qwork/propagation.hpp"

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  long max_iters = 0;
  bool seedless = false;
};

void attach_common(CLI::App* cmd, CliOptions& opt, bool config_required) {
  auto* c = cmd->add_option("--config", opt.config_path, "flat key=value run description");
  if (config_required) c->required();
  cmd->add_option("--out", opt.out_dir, "output directory (overrides out_dir in the config)");
  cmd->add_option("--workers", opt.workers, "parallel sweep points");
  cmd->add_option("--max-iters", opt.max_iters, "override the optimizer iteration cap");
  cmd->add_flag("--seedless", opt.seedless,
                "assert that no random number generator is in use (always holds; all "
                "self-check vectors come from fixed sequences)");
}

qwork::RunConfig assemble(const CliOptions& opt) {
  qwork::RunConfig cfg;
  if (!opt.config_path.empty()) cfg = qwork::load_config(opt.config_path);
  if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
  if (opt.workers > 0) cfg.workers = opt.workers;
  if (opt.max_iters > 0) cfg.optimizer.max_iters = opt.max_iters;
  if (opt.seedless) std::cout << "seedless: no RNG in use; outputs are deterministic\n";
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driving-protocol optimization for dissipation and work fluctuations in "
               "two-level open quantum systems"};
  app.require_subcommand(1);

  CliOptions opt_optimize, opt_sweep, opt_rapid, opt_validate;
  auto* sc_optimize =
      app.add_subcommand("optimize", "gradient-descent protocol optimization for one alpha");
  attach_common(sc_optimize, opt_optimize, true);
  auto* sc_sweep = app.add_subcommand("sweep", "alpha or beta sweep producing Pareto data");
  attach_common(sc_sweep, opt_sweep, true);
  auto* sc_rapid =
      app.add_subcommand("rapid-drive", "analytic jump-protocol baseline and comparison");
  attach_common(sc_rapid, opt_rapid, true);
  auto* sc_validate =
      app.add_subcommand("validate", "run the identity checks and write a JSON report");
  attach_common(sc_validate, opt_validate, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_optimize->parsed()) return qwork::cmd_optimize(assemble(opt_optimize));
    if (sc_sweep->parsed()) return qwork::cmd_sweep(assemble(opt_sweep));
    if (sc_rapid->parsed()) return qwork::cmd_rapid_drive(assemble(opt_rapid));
    if (sc_validate->parsed()) return qwork::cmd_validate(assemble(opt_validate));
  } catch (const qwork::DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qwork::kExitDiverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qwork::kExitBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
