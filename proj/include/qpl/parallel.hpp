#pragma once

// Deterministic chunked fan-out. The index range [begin, end) is cut into
// fixed-size chunks; each chunk is a pure function of its bounds, chunks run
// in waves of `threads`, and results are merged in chunk order. The merged
// value is therefore independent of the thread count (and, for commutative
// monoids, of the chunk size).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <vector>

namespace qpl {

struct ChunkPlan {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
  std::uint64_t chunk = 1'000'000;
  unsigned threads = 1;
};

/// Called after each wave with the cursor (first unprocessed index) and the
/// running total.
template <class R>
using CheckpointFn = std::function<void(std::uint64_t cursor, const R& partial)>;

template <class R, class Fn, class Merge>
R run_chunked(const ChunkPlan& plan, R total, Fn&& fn, Merge&& merge, const CheckpointFn<R>& checkpoint = {}) {
  const std::uint64_t chunk = std::max<std::uint64_t>(plan.chunk, 1);
  const unsigned threads = std::max(plan.threads, 1U);
  std::uint64_t cursor = plan.begin;
  while (cursor < plan.end) {
    std::vector<std::future<R>> wave;
    std::uint64_t next = cursor;
    for (unsigned t = 0; t < threads && next < plan.end; ++t) {
      const std::uint64_t lo = next;
      const std::uint64_t hi = std::min(plan.end, lo + chunk);
      if (threads == 1) {
        std::promise<R> done;
        done.set_value(fn(lo, hi));
        wave.push_back(done.get_future());
      } else {
        wave.push_back(std::async(std::launch::async, [&fn, lo, hi] { return fn(lo, hi); }));
      }
      next = hi;
    }
    for (auto& f : wave) merge(total, f.get());
    cursor = next;
    if (checkpoint) checkpoint(cursor, total);
  }
  return total;
}

}  // namespace qpl
