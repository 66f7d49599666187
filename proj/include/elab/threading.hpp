#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace elab {

/// Worker count: explicit request, else ERASURE_LAB_THREADS, else hardware.
inline int resolve_threads(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ERASURE_LAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Runs fn(worker, begin, end) over a deterministic partition of [0, count).
/// Results must be combined by order-independent reduction by the caller.
inline void parallel_chunks(std::int64_t count, int threads,
                            const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
  threads = static_cast<int>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(threads, count > 0 ? count : 1)));
  if (threads == 1) {
    fn(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::int64_t chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const std::int64_t b = w * chunk;
    const std::int64_t e = std::min<std::int64_t>(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fn, w, b, e);
  }
  for (auto& t : pool) t.join();
}

}  // namespace elab
