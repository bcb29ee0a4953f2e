#pragma once

// Summary statistics over overhead samples and CI-overlap comparison.
//
// Samples come in nanoseconds and are reported in microseconds. Negative
// samples (clock jitter below resolution) are clamped to zero. Quartiles use
// linear interpolation at h = (n - 1) * p on the sorted sample. The 95 %
// interval is the normal approximation 1.96 * s / sqrt(n).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace minimon {

inline constexpr double kZ95 = 1.96;

struct SummaryStats {
  std::size_t n = 0;
  double mean = 0.0;  ///< µs
  double stddev = 0.0;
  double ci95_half = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};

enum class Direction { AFaster, BFaster, Indistinguishable };

struct Comparison {
  std::string config_a;
  std::string config_b;
  bool significant = false;
  Direction direction = Direction::Indistinguishable;
  double ratio = 0.0;  ///< mean_b / mean_a
};

/// Linear-interpolation quantile of an ascending range.
inline double interpolated_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SummaryStats summarize(std::span<const double> samples_ns) {
  if (samples_ns.size() < 2) throw std::invalid_argument("summarize needs at least 2 samples");
  std::vector<double> us(samples_ns.size());
  std::transform(samples_ns.begin(), samples_ns.end(), us.begin(),
                 [](double ns) { return std::max(ns, 0.0) / 1000.0; });

  SummaryStats s;
  s.n = us.size();
  const double n = static_cast<double>(s.n);
  double sum = 0.0;
  for (const double x : us) sum += x;
  s.mean = sum / n;
  double sq = 0.0;
  for (const double x : us) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / (n - 1.0));
  s.ci95_half = kZ95 * s.stddev / std::sqrt(n);

  std::sort(us.begin(), us.end());
  s.q1 = interpolated_quantile(us, 0.25);
  s.median = interpolated_quantile(us, 0.5);
  s.q3 = interpolated_quantile(us, 0.75);
  return s;
}

inline SummaryStats summarize(std::span<const std::int64_t> samples_ns) {
  std::vector<double> d(samples_ns.begin(), samples_ns.end());
  return summarize(std::span<const double>(d));
}

/// Mean per monitored call, for a per-iteration summary at call depth `depth`.
inline double per_call_mean(const SummaryStats& s, std::int64_t depth) {
  return s.mean / static_cast<double>(depth);
}

/// Significant iff the two 95 % intervals do not overlap.
inline Comparison compare(const SummaryStats& a, const SummaryStats& b, std::string config_a = "a",
                          std::string config_b = "b") {
  Comparison c;
  c.config_a = std::move(config_a);
  c.config_b = std::move(config_b);
  c.ratio = a.mean == 0.0 ? (b.mean == 0.0 ? 1.0 : INFINITY) : b.mean / a.mean;
  const bool overlap =
      a.mean - a.ci95_half <= b.mean + b.ci95_half && b.mean - b.ci95_half <= a.mean + a.ci95_half;
  c.significant = !overlap;
  if (c.significant) c.direction = a.mean < b.mean ? Direction::AFaster : Direction::BFaster;
  return c;
}

inline const char* to_string(Direction d) {
  switch (d) {
    case Direction::AFaster:
      return "a_faster";
    case Direction::BFaster:
      return "b_faster";
    case Direction::Indistinguishable:
      return "indistinguishable";
  }
  return "?";
}

}  // namespace minimon
