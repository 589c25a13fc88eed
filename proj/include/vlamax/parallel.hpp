#pragma once
// Static-partition parallel loop; each index is computed independently, so results do not
// depend on the worker count.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace vlamax {

inline int worker_count() {
  if (const char* s = std::getenv("VLAMAX_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(int n, F&& fn) {
  const int nw = std::min(worker_count(), n);
  if (nw <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> err(nw);
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += nw) fn(i);
      } catch (...) {
        err[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

}  // namespace vlamax
