#pragma once

// Deterministic seed derivation and an index-ordered parallel loop for
// Monte Carlo trials.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace anomsearch {

inline constexpr const char* kThreadsEnvVar = "ANOMSEARCH_THREADS";

// splitmix64 finaliser; a bijection on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-trial seed from (base seed, stream, point index, trial index).
// The counter packs stream into 8 bits, point into 24 bits and trial into
// 32 bits, so distinct tuples within those ranges never collide for a fixed
// base seed: the key is xored with a seed-dependent constant and finalised
// by a bijection.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint32_t stream, std::uint32_t point, std::uint32_t trial) {
  const std::uint64_t counter = (static_cast<std::uint64_t>(stream & 0xffu) << 56) |
                                (static_cast<std::uint64_t>(point & 0xffffffu) << 32) | trial;
  return mix64(counter ^ mix64(base + 0x9e3779b97f4a7c15ULL));
}

inline unsigned default_thread_count() {
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [0, count) on `threads` workers. Callers write results
// into slot i so the outcome is independent of scheduling.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace anomsearch
