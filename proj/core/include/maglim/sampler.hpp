#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "maglim/lattice.hpp"
#include "maglim/rng.hpp"

namespace maglim {

struct SpinConfig {
  std::vector<int8_t> spins;  // +1 / -1 per site
  BoundaryCondition bc = BoundaryCondition::Free;

  int spin_sum() const {
    int s = 0;
    for (int8_t v : spins) s += v;
    return s;
  }
};

struct FkConfig {
  std::vector<uint8_t> open;  // per lattice edge
  std::vector<uint8_t> tau;   // per site: ghost edge open
  std::vector<uint8_t> bnd;   // per site: some boundary bond open
  bool wired = false;
};

enum class Algorithm : uint8_t { Metropolis, Wolff, SwendsenWang };
const char* algorithm_name(Algorithm alg);
Algorithm algorithm_from_name(const std::string& name);

class ChainState {
 public:
  ChainState(const LatticeRegion& region, BoundaryCondition bc,
             const ModelParams& params, uint64_t master_seed, uint64_t chain_id);

  const LatticeRegion& region() const { return region_; }
  BoundaryCondition bc() const { return spin_.bc; }
  const ModelParams& params() const { return params_; }
  const SpinConfig& spins() const { return spin_; }
  SpinConfig& spins() { return spin_; }
  CounterRng& rng() { return rng_; }
  uint64_t sweep() const { return sweep_; }

  void metropolis_sweep();
  // Single-cluster update; a cluster bonded to the frozen boundary layer or
  // to the ghost vertex is never flipped.
  void wolff_update();
  // Swendsen-Wang sweep realizing the Edwards-Sokal joint measure with ghost
  // vertex; if fk_out is non-null the intermediate bond configuration is
  // stored there.
  void sw_sweep(FkConfig* fk_out = nullptr);

 private:
  LatticeRegion region_;
  ModelParams params_;
  SpinConfig spin_;
  CounterRng rng_;
  uint64_t sweep_ = 0;
  // scratch
  std::vector<int> stack_;
  std::vector<int> dsu_;
  int dsu_find(int x);
  void dsu_unite(int x, int y);
};

struct ChainSpec {
  Algorithm algorithm = Algorithm::SwendsenWang;
  int64_t n_equil = 100;
  int64_t n_meas = 1000;
  int64_t thin = 1;
  uint64_t seed = 1;
};

// Deterministic given (spec.seed, chain_id): runs n_equil sweeps, then emits a
// snapshot every `thin` sweeps, n_meas snapshots in total. The FkConfig
// pointer is non-null only for Swendsen-Wang.
void run_chain(const LatticeRegion& region, BoundaryCondition bc,
               const ModelParams& params, const ChainSpec& spec, uint64_t chain_id,
               const std::function<void(const SpinConfig&, const FkConfig*)>& sink);

// Raw snapshot dump: little-endian header (magic, width, height, a, bc, h,
// sweep counter) followed by packed spin bits, then packed omega and tau bits.
void write_snapshot(std::ostream& os, const LatticeRegion& region,
                    const ModelParams& params, uint64_t sweep, const SpinConfig& spin,
                    const FkConfig* fk);

}  // namespace maglim
