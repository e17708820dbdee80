#include "edar/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace edar {

int thread_count() {
  static int n = [] {
    if (const char* env = std::getenv("EDAR_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }();
  return n;
}

void parallel_for(long long n, const std::function<void(long long)>& fn) {
  if (n <= 0) return;
  int workers = std::min<long long>(thread_count(), n);
  if (workers <= 1 || n < 4) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  long long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    long long lo = w * chunk;
    long long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace edar
