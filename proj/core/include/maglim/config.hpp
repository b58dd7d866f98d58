#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value experiment configuration with sections; the runner always
// writes back the fully-resolved form (every field explicit) plus a JSON
// mirror. The hash of the resolved text is embedded in every output file.
struct ExperimentConfig {
  std::string kind;

  // [geometry]
  double L = 1.0;  // physical side
  double a = 1.0;  // mesh
  std::string bc = "free";
  int l1 = 8, l2 = 32;  // nested-box sides in sites (coupling runs)

  // [physics]
  double h = 0.0;
  std::vector<double> t_grid;
  std::vector<double> h_grid;
  double eps = 0.125;
  double mass_window = 20.0;
  double lambda = 2.0;

  // [sampling]
  std::string algorithm = "sw";
  int64_t n_equil = 200;
  int64_t n_meas = 1000;
  int64_t thin = 1;
  int chains = 4;
  uint64_t seed = 0;

  // [output]
  std::string out_dir = "out";

  int side_sites() const;  // round(L / a), validated

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);

  std::string resolved_text() const;
  std::string json_text() const;
  uint64_t hash() const;  // FNV-1a of the resolved text
};

std::vector<std::string> experiment_kinds();

}  // namespace maglim
