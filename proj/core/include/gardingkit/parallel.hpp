#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace gk {

/// Worker count: hardware concurrency capped by GARDINGKIT_THREADS, >= 1.
int worker_count();

/// Deterministic parallel map over [0, count): per-index results land in a
/// dense vector, so any thread schedule equals the serial loop. Reductions
/// over the returned vector must then be done serially by the caller.
template <class T, class F>
std::vector<T> parallel_map(long count, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  const int workers = std::min<long>(worker_count(), std::max<long>(count, 1));
  if (workers <= 1 || count < 64) {
    for (long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  const long chunk = (count + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      const long lo = w * chunk;
      const long hi = std::min(count, lo + chunk);
      try {
        for (long i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace gk
