#pragma once

// Deterministic parallel reduction over path indices.
//
// Paths are grouped into fixed-size chunks. Workers claim chunks from an
// atomic cursor, each chunk fills its own accumulator, and the accumulators
// are folded in chunk order afterwards. The result therefore depends only on
// the path count, never on the thread count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace levyfp {

inline constexpr std::uint64_t kPathChunk = 512;

template <class Acc, class Body, class Merge>
Acc reduce_paths(std::uint64_t n_paths, unsigned threads, const Acc& init, Body&& body,
                 Merge&& merge) {
  const std::uint64_t n_chunks = (n_paths + kPathChunk - 1) / kPathChunk;
  std::vector<Acc> partial(n_chunks, init);
  std::atomic<std::uint64_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t chunk = cursor.fetch_add(1);
        if (chunk >= n_chunks) return;
        const std::uint64_t begin = chunk * kPathChunk;
        const std::uint64_t end = std::min(n_paths, begin + kPathChunk);
        for (std::uint64_t path = begin; path < end; ++path) body(path, partial[chunk]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      cursor.store(n_chunks);
    }
  };

  const unsigned n_workers =
      static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, n_chunks)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  Acc total = init;
  for (auto& acc : partial) merge(total, acc);
  return total;
}

}  // namespace levyfp
