#ifndef PSIFDE_THREADING_HPP
#define PSIFDE_THREADING_HPP

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace psifde::detail {

// Worker cap: PSI_HILFER_THREADS in the environment, 0 or unset = auto.
inline unsigned worker_count() {
  static const unsigned n = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const char* env = std::getenv("PSI_HILFER_THREADS");
    if (env == nullptr) return hw;
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 0) return hw;
    return static_cast<unsigned>(v) < hw ? static_cast<unsigned>(v) : hw;
  }();
  return n;
}

// Static block partition over [0, n); deterministic regardless of the
// worker count because each index is processed exactly once.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = worker_count();
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    if (lo >= n) break;
    const std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace psifde::detail

#endif
