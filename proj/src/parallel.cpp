#include "vpclt/parallel.hpp"

namespace vpclt {

namespace {
int g_workers = 0;  // 0 = hardware concurrency
}

int worker_threads() {
  if (g_workers > 0) return g_workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void set_worker_threads(int n) { g_workers = n < 0 ? 0 : n; }

std::size_t chunk_count(std::size_t n) {
  if (n == 0) return 0;
  // fixed layout: at most 64 chunks, at least 1024 items per chunk
  std::size_t by_size = (n + 1023) / 1024;
  return std::min<std::size_t>(64, std::max<std::size_t>(1, by_size));
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t chunks = chunk_count(n);
  const int workers = std::min<int>(worker_threads(), static_cast<int>(chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t lo = n * c / chunks;
      std::size_t hi = n * (c + 1) / chunks;
      fn(lo, hi);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        std::size_t lo = n * c / chunks;
        std::size_t hi = n * (c + 1) / chunks;
        fn(lo, hi);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace vpclt
