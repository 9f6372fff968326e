#include "seal/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace seal {

int thread_cap() {
  if (const char* env = std::getenv("SEAL_TW_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int cap = std::min(thread_cap(), n);
  if (cap <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(cap);
  for (int t = 0; t < cap; ++t) {
    workers.emplace_back([&, t] {
      for (int i = t; i < n; i += cap) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace seal
