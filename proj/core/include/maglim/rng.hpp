#pragma once

#include <cstdint>

namespace maglim {

// Counter-based generator. Every draw is a pure function of (key, counter),
// so independent streams are cheap to split off a master seed and a shared
// random tape can be addressed by absolute counter values.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(uint64_t key, uint64_t counter = 0) : key_(key), ctr_(counter) {}

  // Stream derived from (master seed, stream id); streams are independent.
  static CounterRng stream(uint64_t master_seed, uint64_t stream_id) {
    return CounterRng(mix(master_seed ^ mix(stream_id + 0x9e3779b97f4a7c15ULL)));
  }

  // Stateless access: the value a stream with this key produces at `counter`.
  static uint64_t at(uint64_t key, uint64_t counter) {
    return mix(key + counter * 0x9e3779b97f4a7c15ULL);
  }
  static double uniform_at(uint64_t key, uint64_t counter) {
    return double(at(key, counter) >> 11) * 0x1.0p-53;
  }

  uint64_t next_u64() { return at(key_, ctr_++); }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n).
  uint32_t below(uint32_t n) {
    return uint32_t((__uint128_t(next_u64()) * n) >> 64);
  }

  uint64_t key() const { return key_; }
  uint64_t counter() const { return ctr_; }

 private:
  // SplitMix64 finalizer, applied twice for counter-mode use.
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t key_ = 0;
  uint64_t ctr_ = 0;
};

}  // namespace maglim
