#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "maglim/config.hpp"
#include "maglim/observables.hpp"
#include "maglim/runner.hpp"
#include "maglim/util.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for the 2D Ising magnetization field"};
  app.require_subcommand(1);

  std::string config_path;
  int threads = 0;
  uint64_t seed_override = 0;
  bool have_seed = false;

  // experiment subcommands share the option set
  for (const auto& kind : maglim::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--threads", threads, "worker pool size (default: all cores)");
    sub->add_option("--seed", seed_override, "override the config's master seed")
        ->each([&](const std::string&) { have_seed = true; });
  }
  std::string tag;
  CLI::App* cook = app.add_subcommand("cookbook", "print a ready-to-run config template");
  cook->add_option("tag", tag, "check name")->required();

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    if (sub->get_name() == "cookbook") {
      std::cout << maglim::cookbook_template(tag);
      return 0;
    }
    maglim::set_num_threads(threads);
    maglim::ExperimentConfig cfg = maglim::ExperimentConfig::parse_file(config_path);
    if (cfg.kind != sub->get_name()) {
      std::cerr << "maglim: config kind '" << cfg.kind << "' does not match subcommand '"
                << sub->get_name() << "'\n";
      return 2;
    }
    if (have_seed) cfg.seed = seed_override;
    return maglim::run_experiment(cfg, std::cout);
  } catch (const maglim::ConfigError& e) {
    std::cerr << "maglim: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "maglim: error: " << e.what() << "\n";
    return 3;
  }
}
