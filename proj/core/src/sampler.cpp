#include "maglim/sampler.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

namespace maglim {

const char* algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::Metropolis: return "metropolis";
    case Algorithm::Wolff: return "wolff";
    default: return "sw";
  }
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "metropolis") return Algorithm::Metropolis;
  if (name == "wolff") return Algorithm::Wolff;
  if (name == "sw" || name == "swendsen-wang") return Algorithm::SwendsenWang;
  throw std::invalid_argument("unknown algorithm: " + name);
}

ChainState::ChainState(const LatticeRegion& region, BoundaryCondition bc,
                       const ModelParams& params, uint64_t master_seed,
                       uint64_t chain_id)
    : region_(region), params_(params), rng_(CounterRng::stream(master_seed, chain_id)) {
  if (params.h < 0.0)
    throw std::invalid_argument("ChainState: h must be >= 0 (negate via spin-flip symmetry)");
  spin_.bc = bc;
  spin_.spins.assign(region.num_sites(), 0);
  int sign = bc_sign(bc);
  for (auto& s : spin_.spins) {
    if (params.h > 0.0) s = 1;
    else if (sign != 0) s = int8_t(sign);
    else s = rng_.bernoulli(0.5) ? 1 : -1;
  }
}

void ChainState::metropolis_sweep() {
  const int W = region_.width(), H = region_.height();
  const double beta = params_.beta, hs = params_.h_site();
  const int sign = bc_sign(spin_.bc);
  auto& s = spin_.spins;
  for (int j = 0; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      int x = region_.index(i, j);
      int nbr = 0;
      if (i > 0) nbr += s[x - 1];
      if (i < W - 1) nbr += s[x + 1];
      if (j > 0) nbr += s[x - W];
      if (j < H - 1) nbr += s[x + W];
      if (sign != 0) nbr += sign * region_.boundary_bonds(x);
      double dE = 2.0 * s[x] * (beta * nbr + hs);
      // dE == 0 flips with probability 1/2: still reversible, and avoids the
      // periodic orbit of the always-flip rule on degenerate neighborhoods.
      double acc = dE < 0.0 ? 1.0 : (dE == 0.0 ? 0.5 : std::exp(-dE));
      if (rng_.uniform() < acc) s[x] = -s[x];
    }
  }
  ++sweep_;
}

void ChainState::wolff_update() {
  const int W = region_.width(), H = region_.height();
  const double p = 1.0 - std::exp(-2.0 * params_.beta);
  const double pg = params_.h > 0.0 ? 1.0 - std::exp(-2.0 * params_.h_site()) : 0.0;
  const int sign = bc_sign(spin_.bc);
  auto& s = spin_.spins;

  static thread_local std::vector<uint8_t> in_cluster;
  static thread_local std::vector<int> members;
  in_cluster.assign(region_.num_sites(), 0);
  members.clear();
  stack_.clear();

  int seed = int(rng_.below(uint32_t(region_.num_sites())));
  int8_t cs = s[seed];
  in_cluster[seed] = 1;
  stack_.push_back(seed);
  members.push_back(seed);
  bool pinned = false;

  while (!stack_.empty() && !pinned) {
    int x = stack_.back();
    stack_.pop_back();
    // Frozen bonds: boundary layer (same sign as bc) and ghost vertex (+1).
    if (sign != 0 && cs == sign) {
      int nb = region_.boundary_bonds(x);
      for (int b = 0; b < nb && !pinned; ++b)
        if (rng_.bernoulli(p)) pinned = true;
    }
    if (pg > 0.0 && cs == 1 && rng_.bernoulli(pg)) pinned = true;
    if (pinned) break;

    int i = region_.col(x), j = region_.row(x);
    int nbrs[4];
    int nn = 0;
    if (i > 0) nbrs[nn++] = x - 1;
    if (i < W - 1) nbrs[nn++] = x + 1;
    if (j > 0) nbrs[nn++] = x - W;
    if (j < H - 1) nbrs[nn++] = x + W;
    for (int k = 0; k < nn; ++k) {
      int y = nbrs[k];
      if (!in_cluster[y] && s[y] == cs && rng_.bernoulli(p)) {
        in_cluster[y] = 1;
        stack_.push_back(y);
        members.push_back(y);
      }
    }
  }
  // A free cluster spanning the whole lattice makes the flip a deterministic
  // involution; a coin keeps the chain aperiodic without changing the law.
  bool flip = !pinned && (members.size() < s.size() || rng_.bernoulli(0.5));
  if (flip)
    for (int x : members) s[x] = -s[x];
  ++sweep_;
}

int ChainState::dsu_find(int x) {
  while (dsu_[x] != x) x = dsu_[x] = dsu_[dsu_[x]];
  return x;
}

void ChainState::dsu_unite(int x, int y) { dsu_[dsu_find(x)] = dsu_find(y); }

void ChainState::sw_sweep(FkConfig* fk_out) {
  const int W = region_.width(), H = region_.height();
  const int n = region_.num_sites();
  const double p = 1.0 - std::exp(-2.0 * params_.beta);
  const double pg = params_.h > 0.0 ? 1.0 - std::exp(-2.0 * params_.h_site()) : 0.0;
  const int sign = bc_sign(spin_.bc);
  const int bvert = n, gvert = n + 1;
  auto& s = spin_.spins;

  dsu_.resize(n + 2);
  for (int i = 0; i < n + 2; ++i) dsu_[i] = i;

  FkConfig local;
  FkConfig& fk = fk_out ? *fk_out : local;
  fk.open.assign(region_.num_edges(), 0);
  fk.tau.assign(n, 0);
  fk.bnd.assign(n, 0);
  fk.wired = sign != 0;

  // Bond step: open satisfied edges.
  for (int j = 0; j < H; ++j)
    for (int i = 0; i + 1 < W; ++i) {
      int x = region_.index(i, j);
      if (s[x] == s[x + 1] && rng_.bernoulli(p)) {
        fk.open[region_.hedge(i, j)] = 1;
        dsu_unite(x, x + 1);
      }
    }
  for (int j = 0; j + 1 < H; ++j)
    for (int i = 0; i < W; ++i) {
      int x = region_.index(i, j);
      if (s[x] == s[x + W] && rng_.bernoulli(p)) {
        fk.open[region_.vedge(i, j)] = 1;
        dsu_unite(x, x + W);
      }
    }
  if (sign != 0)
    for (int x = 0; x < n; ++x) {
      if (s[x] != sign) continue;
      int nb = region_.boundary_bonds(x);
      for (int b = 0; b < nb; ++b)
        if (rng_.bernoulli(p)) fk.bnd[x] = 1;
      if (fk.bnd[x]) dsu_unite(x, bvert);
    }
  if (pg > 0.0)
    for (int x = 0; x < n; ++x)
      if (s[x] == 1 && rng_.bernoulli(pg)) {
        fk.tau[x] = 1;
        dsu_unite(x, gvert);
      }

  // Flip step: pinned clusters keep their sign, free clusters get fair coins.
  int rb = dsu_find(bvert), rg = dsu_find(gvert);
  static thread_local std::vector<int8_t> root_sign;
  root_sign.assign(n + 2, 0);
  if (pg > 0.0) root_sign[rg] = 1;
  if (sign != 0 && root_sign[rb] == 0) root_sign[rb] = int8_t(sign);
  for (int x = 0; x < n; ++x) {
    int r = dsu_find(x);
    if (root_sign[r] == 0) root_sign[r] = rng_.bernoulli(0.5) ? 1 : -1;
    s[x] = root_sign[r];
  }
  ++sweep_;
}

void run_chain(const LatticeRegion& region, BoundaryCondition bc,
               const ModelParams& params, const ChainSpec& spec, uint64_t chain_id,
               const std::function<void(const SpinConfig&, const FkConfig*)>& sink) {
  // h < 0 via global spin-flip symmetry: sample at |h| with mirrored bc and
  // negate emitted spins. The FK snapshot is that of the mirrored model.
  bool mirror = params.h < 0.0;
  ModelParams p = params;
  BoundaryCondition run_bc = bc;
  if (mirror) {
    p.h = -params.h;
    if (bc == BoundaryCondition::Plus) run_bc = BoundaryCondition::Minus;
    else if (bc == BoundaryCondition::Minus) run_bc = BoundaryCondition::Plus;
  }

  ChainState chain(region, run_bc, p, spec.seed, chain_id);
  FkConfig fk;
  const bool want_fk = spec.algorithm == Algorithm::SwendsenWang;

  auto step = [&](bool record) {
    switch (spec.algorithm) {
      case Algorithm::Metropolis: chain.metropolis_sweep(); break;
      case Algorithm::Wolff: chain.wolff_update(); break;
      case Algorithm::SwendsenWang: chain.sw_sweep(record && want_fk ? &fk : nullptr); break;
    }
  };

  for (int64_t i = 0; i < spec.n_equil; ++i) step(false);
  for (int64_t m = 0; m < spec.n_meas; ++m) {
    for (int64_t t = 0; t + 1 < spec.thin; ++t) step(false);
    step(true);
    if (mirror) {
      SpinConfig flipped = chain.spins();
      flipped.bc = bc;
      for (auto& v : flipped.spins) v = -v;
      sink(flipped, want_fk ? &fk : nullptr);
    } else {
      sink(chain.spins(), want_fk ? &fk : nullptr);
    }
  }
}

namespace {
void write_bits(std::ostream& os, const std::vector<int8_t>& v) {
  uint8_t byte = 0;
  int nb = 0;
  for (int8_t x : v) {
    byte |= uint8_t(x > 0) << nb;
    if (++nb == 8) {
      os.put(char(byte));
      byte = 0;
      nb = 0;
    }
  }
  if (nb) os.put(char(byte));
}
void write_bits8(std::ostream& os, const std::vector<uint8_t>& v) {
  uint8_t byte = 0;
  int nb = 0;
  for (uint8_t x : v) {
    byte |= uint8_t(x != 0) << nb;
    if (++nb == 8) {
      os.put(char(byte));
      byte = 0;
      nb = 0;
    }
  }
  if (nb) os.put(char(byte));
}
template <typename T>
void write_le(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}
}  // namespace

void write_snapshot(std::ostream& os, const LatticeRegion& region,
                    const ModelParams& params, uint64_t sweep, const SpinConfig& spin,
                    const FkConfig* fk) {
  os.write("MAGSNP01", 8);
  write_le<int32_t>(os, region.width());
  write_le<int32_t>(os, region.height());
  write_le<double>(os, params.a);
  os.put(char(uint8_t(spin.bc)));
  write_le<double>(os, params.h);
  write_le<uint64_t>(os, sweep);
  write_bits(os, spin.spins);
  if (fk) {
    write_bits8(os, fk->open);
    write_bits8(os, fk->tau);
  }
}

}  // namespace maglim
