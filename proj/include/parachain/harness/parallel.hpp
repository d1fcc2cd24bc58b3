#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "parachain/errors.hpp"

namespace parachain::harness {

// Worker count: explicit value, else PARACHAIN_THREADS, else hardware
// concurrency.
inline unsigned resolve_threads(std::optional<unsigned> requested) {
  if (requested) {
    if (*requested < 1) throw ConfigError("--threads must be >= 1");
    return *requested;
  }
  if (const char* env = std::getenv("PARACHAIN_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError(std::string("bad PARACHAIN_THREADS '") + env + "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on `threads` workers. Each index is handled
// exactly once; the first exception thrown by any worker is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace parachain::harness
