#pragma once

#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "ips/rng.hpp"

namespace ips {

/// Number of worker threads to use: an explicit request wins, otherwise the
/// IPS_THREADS environment variable, otherwise 1.
int resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n) on up to `threads` threads with a static block
/// partition. Results must be written to disjoint slots by index so the
/// outcome is identical for every thread count.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t t = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  if (t > n) t = n;
  if (t == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(t);
  for (std::size_t w = 0; w < t; ++w) {
    const std::size_t lo = n * w / t;
    const std::size_t hi = n * (w + 1) / t;
    workers.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Evaluates fn(k, seed_split(master_seed, k)) for k in [0, n) and collects
/// the results by index. Deterministic for any thread count.
template <typename R, typename Fn>
std::vector<R> replicate_map(std::size_t n, std::uint64_t master_seed, int threads, Fn&& fn) {
  std::vector<R> out(n);
  parallel_for(n, threads, [&](std::size_t k) { out[k] = fn(k, seed_split(master_seed, k)); });
  return out;
}

}  // namespace ips
