#include "percsolid/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace percsolid {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PERC_SOLIDIFY_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int64_t num_chunks(int64_t n, int64_t chunk_size) {
  if (n <= 0) return 0;
  return (n + chunk_size - 1) / chunk_size;
}

void parallel_chunks(int64_t n, int64_t chunk_size, int threads,
                     const std::function<void(int64_t, int64_t, int64_t)>& fn) {
  const int64_t chunks = num_chunks(n, chunk_size);
  if (chunks == 0) return;
  threads = resolve_threads(threads);
  if (threads <= 1 || chunks == 1) {
    for (int64_t c = 0; c < chunks; ++c) {
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
    return;
  }
  std::atomic<int64_t> next{0};
  auto worker = [&]() {
    while (true) {
      const int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace percsolid
