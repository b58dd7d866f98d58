#include "maglim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "maglim/lattice.hpp"
#include "maglim/sampler.hpp"

namespace maglim {

std::vector<std::string> experiment_kinds() {
  return {"oracle-validate", "sample",     "mgf",      "free-energy",
          "charfn",          "scaling",    "mesoscopic", "crossing",
          "coupling",        "kasahara-selftest"};
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_grid(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + tok + "' in " + key);
    }
  }
  return out;
}

std::string format_grid(const std::vector<double>& g) {
  std::ostringstream os;
  os.precision(17);
  for (size_t i = 0; i < g.size(); ++i) os << (i ? "," : "") << g[i];
  return os.str();
}

}  // namespace

int ExperimentConfig::side_sites() const {
  double n = L / a;
  int ni = int(std::lround(n));
  if (ni < 1 || std::fabs(n - ni) > 1e-9)
    throw ConfigError("geometry.L must be an integer multiple of geometry.a");
  return ni;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header, line " +
                                                std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value, line " + std::to_string(lineno));
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) throw ConfigError("duplicate key " + full);
    kv[full] = val;
  }

  ExperimentConfig cfg;
  auto take = [&](const std::string& key) -> std::string* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    return &it->second;
  };
  auto num = [&](const std::string& key, auto& field) {
    if (auto* v = take(key)) {
      try {
        size_t pos = 0;
        double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument(*v);
        using T = std::remove_reference_t<decltype(field)>;
        field = T(d);
        if (double(field) != d) throw std::invalid_argument(*v);  // e.g. fractional int
      } catch (const std::exception&) {
        throw ConfigError("bad number for " + key + ": '" + *v + "'");
      }
    }
  };

  if (auto* v = take("kind")) cfg.kind = *v;
  if (cfg.kind.empty()) throw ConfigError("missing required key: kind");
  auto kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end())
    throw ConfigError("unknown experiment kind: " + cfg.kind);

  num("geometry.L", cfg.L);
  num("geometry.a", cfg.a);
  if (auto* v = take("geometry.bc")) cfg.bc = *v;
  num("geometry.l1", cfg.l1);
  num("geometry.l2", cfg.l2);
  num("physics.h", cfg.h);
  if (auto* v = take("physics.t_grid")) cfg.t_grid = parse_grid(*v, "physics.t_grid");
  if (auto* v = take("physics.h_grid")) cfg.h_grid = parse_grid(*v, "physics.h_grid");
  num("physics.eps", cfg.eps);
  num("physics.mass_window", cfg.mass_window);
  num("physics.lambda", cfg.lambda);
  if (auto* v = take("sampling.algorithm")) cfg.algorithm = *v;
  num("sampling.n_equil", cfg.n_equil);
  num("sampling.n_meas", cfg.n_meas);
  num("sampling.thin", cfg.thin);
  num("sampling.chains", cfg.chains);
  if (auto* v = take("sampling.seed")) {
    try {
      cfg.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw ConfigError("bad number for sampling.seed: '" + *v + "'");
    }
  } else {
    throw ConfigError("missing required key: sampling.seed");
  }
  if (auto* v = take("output.dir")) cfg.out_dir = *v;

  // validation
  try {
    bc_from_name(cfg.bc);
    algorithm_from_name(cfg.algorithm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.a <= 0.0) throw ConfigError("geometry.a must be positive");
  if (cfg.L <= 0.0) throw ConfigError("geometry.L must be positive");
  if (cfg.h < 0.0) throw ConfigError("physics.h must be non-negative");
  if (cfg.n_equil < 0 || cfg.n_meas < 1 || cfg.thin < 1 || cfg.chains < 1)
    throw ConfigError("sampling counts must be positive");
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(e.what()) + " (in " + path + ")");
  }
}

std::string ExperimentConfig::resolved_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind = " << kind << "\n\n";
  os << "[geometry]\n";
  os << "L = " << L << "\n";
  os << "a = " << a << "\n";
  os << "bc = " << bc << "\n";
  os << "l1 = " << l1 << "\n";
  os << "l2 = " << l2 << "\n\n";
  os << "[physics]\n";
  os << "h = " << h << "\n";
  os << "t_grid = " << format_grid(t_grid) << "\n";
  os << "h_grid = " << format_grid(h_grid) << "\n";
  os << "eps = " << eps << "\n";
  os << "mass_window = " << mass_window << "\n";
  os << "lambda = " << lambda << "\n\n";
  os << "[sampling]\n";
  os << "algorithm = " << algorithm << "\n";
  os << "n_equil = " << n_equil << "\n";
  os << "n_meas = " << n_meas << "\n";
  os << "thin = " << thin << "\n";
  os << "chains = " << chains << "\n";
  os << "seed = " << seed << "\n\n";
  os << "[output]\n";
  os << "dir = " << out_dir << "\n";
  return os.str();
}

std::string ExperimentConfig::json_text() const {
  nlohmann::json j;
  j["kind"] = kind;
  j["geometry"] = {{"L", L}, {"a", a}, {"bc", bc}, {"l1", l1}, {"l2", l2}};
  j["physics"] = {{"h", h},       {"t_grid", t_grid},           {"h_grid", h_grid},
                  {"eps", eps},   {"mass_window", mass_window}, {"lambda", lambda}};
  j["sampling"] = {{"algorithm", algorithm}, {"n_equil", n_equil}, {"n_meas", n_meas},
                   {"thin", thin},           {"chains", chains},   {"seed", seed}};
  j["output"] = {{"dir", out_dir}};
  return j.dump(2) + "\n";
}

uint64_t ExperimentConfig::hash() const {
  std::string text = resolved_text();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace maglim
