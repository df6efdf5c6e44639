#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "dla/errors.hpp"

namespace dla {

// Deterministic work-sharing: items [0, n) are processed in fixed chunks
// [c*chunk_size, min(n, (c+1)*chunk_size)). Any worker may claim any chunk,
// but chunk boundaries — and therefore anything accumulated per chunk and
// combined in chunk order — do not depend on the worker count. fn must write
// only to per-chunk slots (no shared mutable state).
template <class Fn>
void for_chunks(int64_t n, int64_t chunk_size, int workers, Fn&& fn) {
  if (n <= 0) return;
  if (chunk_size < 1) throw ConfigError("chunk size must be >= 1");
  if (workers < 1) throw ConfigError("worker count must be >= 1");
  const int64_t n_chunks = (n + chunk_size - 1) / chunk_size;
  if (workers == 1 || n_chunks == 1) {
    for (int64_t c = 0; c < n_chunks; ++c)
      fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto body = [&] {
    for (;;) {
      int64_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      try {
        fn(c * chunk_size, std::min(n, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int n_threads = static_cast<int>(std::min<int64_t>(workers, n_chunks));
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dla
