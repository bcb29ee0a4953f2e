#pragma once

#include <chrono>
#include <cstdint>

namespace minimon {

/// Monotonic nanosecond time source. Never wall-clock.
inline std::int64_t now_ns() noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

/// Smallest nonzero step observed between consecutive clock reads.
inline std::int64_t estimate_clock_resolution_ns(int probes = 1000) {
  std::int64_t best = 0;
  std::int64_t prev = now_ns();
  for (int i = 0; i < probes; ++i) {
    std::int64_t cur = now_ns();
    while (cur == prev) cur = now_ns();
    const std::int64_t step = cur - prev;
    if (best == 0 || step < best) best = step;
    prev = cur;
  }
  return best;
}

}  // namespace minimon
