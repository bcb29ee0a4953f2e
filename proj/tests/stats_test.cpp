#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "minimon/stats.hpp"
#include "oracles.hpp"

using namespace minimon;

namespace {

std::vector<double> us_to_ns(std::vector<double> us) {
  for (auto& x : us) x *= 1000.0;
  return us;
}

SummaryStats with_ci(double mean, double half) {
  SummaryStats s;
  s.n = 100;
  s.mean = mean;
  s.ci95_half = half;
  return s;
}

void expect_rel(double actual, double expected) {
  const double scale = std::max(std::abs(expected), 1e-12);
  EXPECT_LE(std::abs(actual - expected) / scale, 1e-9) << actual << " vs " << expected;
}

}  // namespace

TEST(Summarize, SmallExample) {
  const auto s = summarize(std::span<const double>(us_to_ns({1, 2, 3})));
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.median, 2.0);
  EXPECT_DOUBLE_EQ(s.stddev, 1.0);
  EXPECT_EQ(s.n, 3u);
}

TEST(Summarize, ConstantHasZeroSpread) {
  const auto s = summarize(std::span<const double>(us_to_ns({5, 5, 5, 5})));
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_EQ(s.stddev, 0.0);
  EXPECT_EQ(s.ci95_half, 0.0);
}

TEST(Summarize, QuartilesOneToEight) {
  const auto s = summarize(std::span<const double>(us_to_ns({8, 3, 1, 7, 2, 6, 4, 5})));
  EXPECT_DOUBLE_EQ(s.q1, 2.75);
  EXPECT_DOUBLE_EQ(s.median, 4.5);
  EXPECT_DOUBLE_EQ(s.q3, 6.25);
}

TEST(Summarize, NegativeSamplesClampToZero) {
  const auto s = summarize(std::span<const double>(std::vector<double>{-500, 1000}));
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
}

TEST(Summarize, IntegerOverload) {
  const std::vector<std::int64_t> v{1000, 2000, 3000};
  EXPECT_DOUBLE_EQ(summarize(std::span<const std::int64_t>(v)).mean, 2.0);
}

TEST(Summarize, NeedsTwoSamples) {
  EXPECT_THROW(summarize(std::span<const double>(std::vector<double>{1})), std::invalid_argument);
  EXPECT_THROW(summarize(std::span<const double>(std::vector<double>{})), std::invalid_argument);
}

TEST(Summarize, PerCallMean) {
  const auto s = summarize(std::span<const double>(us_to_ns({10, 10})));
  EXPECT_DOUBLE_EQ(per_call_mean(s, 10), 1.0);
}

TEST(SummarizeProperty, MatchesNaiveOracle) {
  std::mt19937_64 rng(42);
  for (int set = 0; set < 1000; ++set) {
    const auto ns = oracles::random_sample_set(rng, set);
    const auto s = summarize(std::span<const double>(ns));
    const auto o = oracles::naive_summary(ns);
    expect_rel(s.mean, o.mean);
    expect_rel(s.stddev, o.stddev);
    expect_rel(s.ci95_half, o.ci);
    expect_rel(s.q1, o.q1);
    expect_rel(s.median, o.median);
    expect_rel(s.q3, o.q3);
    if (HasFailure()) FAIL() << "sample set " << set;
  }
}

TEST(Compare, SignificantDifference) {
  const auto c = compare(with_ci(1.0, 0.1), with_ci(2.0, 0.1));
  EXPECT_TRUE(c.significant);
  EXPECT_EQ(c.direction, Direction::AFaster);
  EXPECT_DOUBLE_EQ(c.ratio, 2.0);
}

TEST(Compare, OverlapIsIndistinguishable) {
  const auto c = compare(with_ci(1.0, 0.6), with_ci(2.0, 0.6));
  EXPECT_FALSE(c.significant);
  EXPECT_EQ(c.direction, Direction::Indistinguishable);
}

TEST(Compare, BFaster) {
  const auto c = compare(with_ci(3.0, 0.1), with_ci(1.0, 0.1), "x", "y");
  EXPECT_EQ(c.direction, Direction::BFaster);
  EXPECT_EQ(c.config_a, "x");
  EXPECT_EQ(c.config_b, "y");
}

TEST(Compare, AggregatedVersusCombinationIsSignificantByThisRule) {
  const auto c = compare(with_ci(0.4014, 0.0003), with_ci(0.3897, 0.0002));
  EXPECT_TRUE(c.significant);
  EXPECT_EQ(c.direction, Direction::BFaster);
}

TEST(Compare, TouchingIntervalsOverlap) {
  EXPECT_FALSE(compare(with_ci(1.0, 0.5), with_ci(2.0, 0.5)).significant);
}

TEST(Compare, DirectionNames) {
  EXPECT_STREQ(to_string(Direction::AFaster), "a_faster");
  EXPECT_STREQ(to_string(Direction::BFaster), "b_faster");
  EXPECT_STREQ(to_string(Direction::Indistinguishable), "indistinguishable");
}
