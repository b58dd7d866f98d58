#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace maglim {

// Worker-pool size used by all parallel drivers (0 = hardware concurrency).
void set_num_threads(int n);
int num_threads();

// Runs fn(task) for task in [0, n_tasks) on the worker pool. Tasks must not
// share mutable state; results are typically written to pre-sized slots.
inline void parallel_for(int64_t n_tasks, const std::function<void(int64_t)>& fn) {
  int nt = num_threads();
  if (nt <= 1 || n_tasks <= 1) {
    for (int64_t i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      int64_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  int spawn = int(std::min<int64_t>(nt, n_tasks));
  pool.reserve(spawn);
  for (int i = 0; i < spawn; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace maglim
