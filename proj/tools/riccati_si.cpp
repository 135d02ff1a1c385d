#include <CLI11.hpp>

#include <riccati_si/cli.hpp>

namespace cli = riccati_si::cli;

int main(int argc, char** argv) {
  CLI::App app{"Low-rank solvers for large continuous-time algebraic Riccati equations"};
  app.require_subcommand(1);

  std::string run_config, run_out;
  auto* run = app.add_subcommand("run", "Solve one configuration");
  run->add_option("--config", run_config, "Run configuration (JSON)")->required();
  run->add_option("--out", run_out, "Output directory (defaults to the configured output or .)");

  std::vector<std::string> compare_configs;
  std::string compare_out = ".";
  auto* compare = app.add_subcommand("compare", "Run several configurations on the same problem");
  compare->add_option("--configs", compare_configs, "Run configurations (JSON)")->required();
  compare->add_option("--out", compare_out, "Output directory");

  std::string suite, report, fault;
  std::uint64_t seed = 1;
  auto* verify = app.add_subcommand("verify", "Run a named verification suite");
  verify->add_option("--suite", suite, "identities, oracle or bound")->required();
  verify->add_option("--seed", seed, "Seed for the random instances");
  verify->add_option("--report", report, "Write the JSON report here instead of stdout");
  verify->add_option("--inject-fault", fault, "Test hook: corrupt_T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kConfigError;
  }

  try {
    if (*run) return cli::cmd_run(run_config, run_out.empty() ? "." : run_out);
    if (*compare) {
      std::vector<std::filesystem::path> paths(compare_configs.begin(), compare_configs.end());
      return cli::cmd_compare(paths, compare_out);
    }
    return cli::cmd_verify(suite, {seed, fault}, report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kConfigError;
  }
}
