#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "maglim/config.hpp"

namespace maglim {

// Runs the experiment described by the config and writes its output tree
// (resolved config, JSON mirror, result CSVs, manifest) under cfg.out_dir.
// Returns 0 on success, 4 when a built-in acceptance check fails. Throws
// ConfigError for invalid parameter combinations.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Ready-to-run config template for a named desk-scale check. Throws
// ConfigError for unknown tags; the message lists the valid ones.
std::string cookbook_template(const std::string& tag);
std::vector<std::string> cookbook_tags();

}  // namespace maglim
