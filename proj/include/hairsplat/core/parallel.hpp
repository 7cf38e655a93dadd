#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hairsplat {

/// Worker count: HAIRSPLAT_THREADS if set, else hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("HAIRSPLAT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, n) across threads, static chunking. Results must
/// not depend on execution order; use chunk-indexed outputs for reductions.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Deterministic parallel reduction: partials start from `zero`, are filled
/// per chunk and combined in chunk order. The chunk layout is fixed
/// (kChunks) so the result does not depend on the worker count.
template <typename Acc>
Acc parallel_reduce(int n, const Acc& zero, const std::function<void(int, Acc&)>& fn,
                    const std::function<void(Acc&, const Acc&)>& combine) {
  constexpr int kChunks = 64;
  const int chunks = std::min(kChunks, std::max(1, n));
  std::vector<Acc> partial(chunks, zero);
  parallel_for(chunks, [&](int c) {
    const int lo = static_cast<int>(static_cast<long long>(n) * c / chunks);
    const int hi = static_cast<int>(static_cast<long long>(n) * (c + 1) / chunks);
    for (int i = lo; i < hi; ++i) fn(i, partial[c]);
  });
  Acc acc = zero;
  for (int c = 0; c < chunks; ++c) combine(acc, partial[c]);
  return acc;
}

}  // namespace hairsplat
