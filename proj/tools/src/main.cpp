#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tqp_cli/commands.hpp"

namespace {

void add_common(CLI::App* sub, tqp::cli::GlobalOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON config file; unknown keys are rejected")
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", opts.seed, "Master seed (overrides the config)");
  sub->add_option("--out", opts.out, "Output prefix; writes <prefix>.csv and <prefix>.json");
  sub->add_option("--cutoff", opts.cutoff, "Fock cutoff override");
  sub->add_option("--threads", opts.threads, "Worker threads (flag > TQP_THREADS > config > 1)")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-qumode parity simulator and verification suite"};
  app.set_version_flag("--version", std::string(TQP_VERSION_STRING));
  app.require_subcommand(1);

  tqp::cli::GlobalOptions opts;
  const char* help[] = {"Entropy of thermal and TQP initial states over an <n> grid",
                        "Parity-measurement fidelity of the engineered controlled parity",
                        "Operator algebra and gate-equivalence residuals",
                        "Random logical circuits: mixed state vs qubit oracle",
                        "Noise commutators and pure-state DFS nonexistence"};
  std::size_t i = 0;
  for (const auto& name : tqp::cli::command_names()) add_common(app.add_subcommand(name, help[i++]), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tqp::cli::kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return tqp::cli::execute(command, opts, std::cout, std::cerr);
}
