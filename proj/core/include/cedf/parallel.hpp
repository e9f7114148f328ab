#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cedf::parallel {

// Deterministic chunked map: splits [0, count) into fixed chunks, runs
// chunk_fn(chunk_index, begin, end) on up to `jobs` threads, and returns the
// per-chunk results ordered by chunk index. Determinism contract: chunk
// boundaries depend only on (count, jobs-independent chunk size), results are
// merged in chunk order, and callers seed any randomness per chunk index —
// so the output is identical for every jobs value, including jobs == 1.
template <class R>
std::vector<R> map_chunks(int jobs, std::uint64_t count, std::uint64_t chunk_size,
                          const std::function<R(std::uint64_t, std::uint64_t, std::uint64_t)>& chunk_fn) {
  if (jobs < 1) throw std::invalid_argument("map_chunks: jobs must be >= 1");
  if (chunk_size == 0) throw std::invalid_argument("map_chunks: chunk_size must be >= 1");
  const std::uint64_t n_chunks = count == 0 ? 0 : (count + chunk_size - 1) / chunk_size;
  std::vector<R> results(n_chunks);
  if (n_chunks == 0) return results;

  auto run_range = [&](std::uint64_t chunk) {
    const std::uint64_t begin = chunk * chunk_size;
    const std::uint64_t end = std::min(count, begin + chunk_size);
    results[chunk] = chunk_fn(chunk, begin, end);
  };

  if (jobs == 1 || n_chunks == 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run_range(c);
    return results;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), n_chunks));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::uint64_t chunk = next.fetch_add(1, std::memory_order_relaxed);
        if (chunk >= n_chunks) break;
        try {
          run_range(chunk);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace cedf::parallel
