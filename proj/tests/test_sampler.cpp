#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>
#include <sstream>

#include "maglim/exact.hpp"
#include "maglim/sampler.hpp"
#include "maglim/stats.hpp"

using namespace maglim;

namespace {

std::vector<int64_t> count_spin_sums(const LatticeRegion& region, BoundaryCondition bc,
                                     const ModelParams& params, const ChainSpec& spec,
                                     const ExactDistribution& exact) {
  std::vector<int64_t> counts(exact.spin_sums.size(), 0);
  run_chain(region, bc, params, spec, 0, [&](const SpinConfig& spin, const FkConfig*) {
    int s = spin.spin_sum();
    auto it = std::lower_bound(exact.spin_sums.begin(), exact.spin_sums.end(), s);
    REQUIRE(it != exact.spin_sums.end());
    REQUIRE(*it == s);
    counts[size_t(it - exact.spin_sums.begin())]++;
  });
  return counts;
}

}  // namespace

TEST_CASE("stationary law matches enumeration (quick)") {
  LatticeRegion r = build_region(2, 2, 1.0);
  for (auto alg : {Algorithm::Metropolis, Algorithm::Wolff, Algorithm::SwendsenWang})
    for (auto bc : {BoundaryCondition::Plus, BoundaryCondition::Free})
      for (double h : {0.0, 0.5}) {
        ModelParams p = ModelParams::critical(h, 1.0);
        ExactDistribution exact = enumerate_ising(r, bc, p);
        ChainSpec spec{alg, 200, 40000, alg == Algorithm::Wolff ? 8 : 2, 11};
        auto counts = count_spin_sums(r, bc, p, spec, exact);
        CHECK(total_variation(counts, exact.probs) < 0.03);
        CHECK(chi_square_test(counts, exact.probs) > 1e-4);
      }
}

TEST_CASE("chains are deterministic given seed and chain id") {
  LatticeRegion r = build_region(4, 4, 1.0);
  ModelParams p = ModelParams::critical(0.2, 1.0);
  ChainSpec spec{Algorithm::SwendsenWang, 10, 20, 1, 99};
  std::vector<int> a, b, c;
  run_chain(r, BoundaryCondition::Plus, p, spec, 0,
            [&](const SpinConfig& s, const FkConfig*) { a.push_back(s.spin_sum()); });
  run_chain(r, BoundaryCondition::Plus, p, spec, 0,
            [&](const SpinConfig& s, const FkConfig*) { b.push_back(s.spin_sum()); });
  run_chain(r, BoundaryCondition::Plus, p, spec, 1,
            [&](const SpinConfig& s, const FkConfig*) { c.push_back(s.spin_sum()); });
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("negative field mirrors the positive-field law") {
  LatticeRegion r = build_region(2, 2, 1.0);
  ModelParams neg = ModelParams::critical(-0.4, 1.0);
  ModelParams pos = ModelParams::critical(0.4, 1.0);
  ChainSpec spec{Algorithm::SwendsenWang, 100, 5000, 2, 5};
  std::vector<int> mneg, mpos;
  run_chain(r, BoundaryCondition::Plus, neg, spec, 0,
            [&](const SpinConfig& s, const FkConfig*) {
              CHECK(s.bc == BoundaryCondition::Plus);
              mneg.push_back(s.spin_sum());
            });
  // the mirror: minus bc at +h, spins negated
  run_chain(r, BoundaryCondition::Minus, pos, spec, 0,
            [&](const SpinConfig& s, const FkConfig*) { mpos.push_back(-s.spin_sum()); });
  CHECK(mneg == mpos);
}

TEST_CASE("direct negative h construction refuses") {
  LatticeRegion r = build_region(2, 2, 1.0);
  CHECK_THROWS_AS(ChainState(r, BoundaryCondition::Free, ModelParams::critical(-1.0, 1.0), 1, 0),
                  std::invalid_argument);
}

TEST_CASE("swendsen-wang emits consistent FK snapshots") {
  LatticeRegion r = build_region(3, 3, 1.0);
  ModelParams p = ModelParams::critical(0.5, 1.0);
  ChainSpec spec{Algorithm::SwendsenWang, 50, 200, 1, 3};
  run_chain(r, BoundaryCondition::Plus, p, spec, 0,
            [&](const SpinConfig& s, const FkConfig* fk) {
              REQUIRE(fk != nullptr);
              REQUIRE(int(fk->open.size()) == r.num_edges());
              REQUIRE(int(fk->tau.size()) == r.num_sites());
              CHECK(fk->wired);
              for (int e = 0; e < r.num_edges(); ++e)
                if (fk->open[e]) {
                  auto [x, y] = r.edge_sites(e);
                  CHECK(s.spins[x] == s.spins[y]);  // only satisfied edges open
                }
              for (int x = 0; x < r.num_sites(); ++x)
                if (fk->tau[x]) CHECK(s.spins[x] == 1);  // ghost pins +1
            });
}

TEST_CASE("other algorithms do not emit FK snapshots") {
  LatticeRegion r = build_region(2, 2, 1.0);
  ChainSpec spec{Algorithm::Metropolis, 10, 5, 1, 3};
  run_chain(r, BoundaryCondition::Free, ModelParams::critical(), spec, 0,
            [&](const SpinConfig&, const FkConfig* fk) { CHECK(fk == nullptr); });
}

TEST_CASE("snapshot dump layout") {
  LatticeRegion r = build_region(3, 2, 0.5);
  ModelParams p = ModelParams::critical(0.25, 0.5);
  SpinConfig spin;
  spin.bc = BoundaryCondition::Minus;
  spin.spins = {1, -1, 1, 1, 1, -1};
  std::ostringstream os(std::ios::binary);
  write_snapshot(os, r, p, 42, spin, nullptr);
  std::string buf = os.str();
  REQUIRE(buf.size() == 8 + 4 + 4 + 8 + 1 + 8 + 8 + 1);
  CHECK(buf.compare(0, 8, "MAGSNP01") == 0);
  int32_t w, h;
  std::memcpy(&w, buf.data() + 8, 4);
  std::memcpy(&h, buf.data() + 12, 4);
  CHECK(w == 3);
  CHECK(h == 2);
  CHECK(uint8_t(buf[24]) == uint8_t(BoundaryCondition::Minus));
  // packed spins: bits 0..5 = 1,0,1,1,1,0 -> 0b011101 = 0x1d
  CHECK(uint8_t(buf.back()) == 0x1d);
}
