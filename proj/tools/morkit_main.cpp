#include <iostream>

#include <CLI11.hpp>

#include "morkit/config.hpp"
#include "morkit/errors.hpp"
#include "morkit/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"morkit - balanced-truncation model order reduction for RLCk "
               "circuit models"};
  app.require_subcommand(1);

  std::string config_path;
  bool dry_run = false;
  bool verbose = false;

  CLI::App* reduce =
      app.add_subcommand("reduce", "run the reduction and verification "
                                   "pipeline described by a config file");
  reduce->add_option("config", config_path, "path to the key=value config file")
      ->required()
      ->check(CLI::ExistingFile);
  reduce->add_flag("--dry-run", dry_run, "validate the config and exit");
  reduce->add_flag("--verbose", verbose, "echo the run log to stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const morkit::RunConfig cfg = morkit::load_config(config_path);
    if (dry_run) {
      std::cout << morkit::dump_config(cfg);
      std::cout << "config ok\n";
      return 0;
    }
    const morkit::RunArtifacts artifacts =
        morkit::run(cfg, verbose ? &std::cout : nullptr);
    std::cout << "reduced order " << artifacts.report.original_order << " -> "
              << artifacts.report.rom_order << " ("
              << artifacts.report.reduction_pct << "% reduction)\n";
    std::cout << "report: " << artifacts.report_csv << "\n";
    return 0;
  } catch (const morkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
