#include <benchmark/benchmark.h>

#include "maglim/cluster.hpp"
#include "maglim/observables.hpp"
#include "maglim/sampler.hpp"

using namespace maglim;

namespace {

ChainState make_chain(int side, double h) {
  LatticeRegion region = build_region(side, side, 1.0 / side);
  return ChainState(region, BoundaryCondition::Plus,
                    ModelParams::critical(h, 1.0 / side), 1234, 0);
}

void bm_metropolis_sweep(benchmark::State& state) {
  ChainState chain = make_chain(int(state.range(0)), 0.0);
  for (auto _ : state) chain.metropolis_sweep();
  state.SetItemsProcessed(state.iterations() * chain.region().num_sites());
}
BENCHMARK(bm_metropolis_sweep)->Arg(32)->Arg(128);

void bm_wolff_update(benchmark::State& state) {
  ChainState chain = make_chain(int(state.range(0)), 0.0);
  for (auto _ : state) chain.wolff_update();
}
BENCHMARK(bm_wolff_update)->Arg(32)->Arg(128);

void bm_sw_sweep(benchmark::State& state) {
  ChainState chain = make_chain(int(state.range(0)), 0.0);
  for (auto _ : state) chain.sw_sweep();
  state.SetItemsProcessed(state.iterations() * chain.region().num_sites());
}
BENCHMARK(bm_sw_sweep)->Arg(32)->Arg(128)->Arg(256);

void bm_decompose(benchmark::State& state) {
  int side = int(state.range(0));
  ChainState chain = make_chain(side, 0.0);
  FkConfig fk;
  for (int i = 0; i < 50; ++i) chain.sw_sweep(&fk);
  for (auto _ : state)
    benchmark::DoNotOptimize(decompose(fk, chain.region(), 1.0 / side));
}
BENCHMARK(bm_decompose)->Arg(32)->Arg(128);

void bm_open_circuit(benchmark::State& state) {
  int side = int(state.range(0));
  ChainState chain = make_chain(side, 0.0);
  FkConfig fk;
  for (int i = 0; i < 50; ++i) chain.sw_sweep(&fk);
  AnnulusSpec ann = AnnulusSpec::centered(chain.region(), 3 * side / 4, side / 8);
  for (auto _ : state)
    benchmark::DoNotOptimize(open_circuit(fk, chain.region(), ann));
}
BENCHMARK(bm_open_circuit)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
