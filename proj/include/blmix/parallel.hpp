#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace blmix {

// Thread budget: BLMIX_THREADS env overrides the requested degree, which
// overrides hardware concurrency.
inline int resolve_threads(int requested = 0) {
  if (const char* env = std::getenv("BLMIX_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Contiguous block split; f(begin, end) runs on disjoint ranges, so results
// are bitwise independent of the thread count.
template <class F>
void parallel_for(std::int64_t count, int threads, F&& f) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    f(std::int64_t{0}, count);
    return;
  }
  const int nt = static_cast<int>(std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  const std::int64_t chunk = (count + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::int64_t b = t * chunk;
    const std::int64_t e = std::min(count, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&f, b, e] { f(b, e); });
  }
  for (auto& th : pool) th.join();
}

// Work-stealing by index for tasks of uneven cost; g(i) must write only to
// slot i, which keeps results independent of the schedule.
template <class G>
void parallel_for_dynamic(std::int64_t count, int threads, G&& g) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (std::int64_t i = 0; i < count; ++i) g(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      g(i);
    }
  };
  const int nt = static_cast<int>(std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace blmix
