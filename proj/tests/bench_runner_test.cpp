#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "minimon/bench_runner.hpp"
#include "minimon/stats.hpp"
#include "test_support.hpp"

using namespace minimon;
using testing_support::TempDir;

namespace {

BenchmarkConfig small_config(const std::string& id, ProbeKind probe, std::int64_t n, int runs) {
  BenchmarkConfig c;
  c.config_id = id;
  c.pipeline.probe = probe;
  c.iterations = n;
  c.runs = runs;
  return c;
}

std::size_t count_prefix(const std::filesystem::path& file, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& line : testing_support::read_lines(file)) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST(DiscardWarmup, Examples) {
  std::vector<int> ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(discard_warmup(ten, 0.5), (std::vector<int>{5, 6, 7, 8, 9}));
  EXPECT_EQ(discard_warmup(ten, 0.0), ten);
  EXPECT_EQ(discard_warmup(std::vector<int>{1, 2, 3}, 0.5), (std::vector<int>{2, 3}));
  EXPECT_THROW(discard_warmup(ten, 1.0), std::invalid_argument);
  EXPECT_THROW(discard_warmup(ten, -0.1), std::invalid_argument);
}

TEST(DiscardWarmupProperty, KeepsSuffixOfExpectedLength) {
  for (std::size_t n = 0; n < 60; ++n) {
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    for (const double f : {0.0, 0.1, 0.25, 0.5, 0.9, 0.99}) {
      const auto kept = discard_warmup(v, f);
      const auto drop = static_cast<std::size_t>(std::floor(f * static_cast<double>(n)));
      ASSERT_EQ(kept.size(), n - drop);
      ASSERT_TRUE(std::equal(kept.begin(), kept.end(), v.end() - static_cast<std::ptrdiff_t>(kept.size())));
    }
  }
}

TEST(RunConfig, TwoRunsHundredSamples) {
  TempDir dir;
  const auto set = run_config(small_config("base", ProbeKind::None, 100, 2), dir.path());
  ASSERT_EQ(set.runs.size(), 2u);
  EXPECT_FALSE(set.failed());
  for (int r = 0; r < 2; ++r) {
    const auto csv = run_file(result_dir(dir.path(), "base", 10), r, ".csv");
    ASSERT_TRUE(std::filesystem::exists(csv));
    EXPECT_EQ(testing_support::read_lines(csv).size(), 101u);
    EXPECT_EQ(set.runs[r].samples_ns.size(), 100u);
    EXPECT_NE(set.runs[r].checksum, 0);
  }
}

TEST(RunConfig, FreshProcessPerRun) {
  TempDir dir;
  const auto set = run_config(small_config("base", ProbeKind::None, 10, 3), dir.path());
  std::set<long> pids;
  for (const auto& r : set.runs) pids.insert(r.pid);
  pids.insert(static_cast<long>(::getpid()));
  EXPECT_EQ(pids.size(), 4u);
}

TEST(RunConfig, DurationLogHasTenLinesPerIteration) {
  TempDir dir;
  const auto set = run_config(small_config("dur", ProbeKind::DirectDuration, 100, 2), dir.path());
  for (int r = 0; r < 2; ++r) {
    const auto log = run_file(result_dir(dir.path(), "dur", 10), r, ".log");
    EXPECT_EQ(count_prefix(log, "DUR;"), 1000u);
    EXPECT_EQ(set.runs[r].counters.enqueued, 1000u);
    EXPECT_EQ(set.runs[r].counters.written, 1000u);
  }
}

TEST(RunConfig, AggregatedLogConservesInvocations) {
  TempDir dir;
  auto c = small_config("agg", ProbeKind::DirectAggregating, 2050, 1);
  run_config(c, dir.path());
  std::int64_t invocations = 0;
  std::size_t lines = 0;
  for (const auto& rec : testing_support::read_records(run_file(result_dir(dir.path(), "agg", 10), 0, ".log"))) {
    invocations += std::get<AggregatedRecord>(rec).count;
    ++lines;
  }
  EXPECT_EQ(invocations, 20500);
  EXPECT_EQ(lines, 21u);
}

TEST(RunConfig, NullWriterLeavesNoLog) {
  TempDir dir;
  auto c = small_config("nul", ProbeKind::DirectFull, 50, 1);
  c.pipeline.writer = WriterKind::Null;
  const auto set = run_config(c, dir.path());
  EXPECT_FALSE(std::filesystem::exists(run_file(result_dir(dir.path(), "nul", 10), 0, ".log")));
  EXPECT_EQ(set.runs[0].counters.written, 500u);
}

TEST(RunConfig, InProcessModeMatches) {
  TempDir dir;
  const auto set = run_config(small_config("base", ProbeKind::None, 20, 2), dir.path(), RunnerOptions{false, 0});
  for (const auto& r : set.runs) EXPECT_EQ(r.pid, static_cast<long>(::getpid()));
}

TEST(RunConfig, MetadataEchoesConfig) {
  TempDir dir;
  const auto c = small_config("meta", ProbeKind::DirectFull, 10, 1);
  run_config(c, dir.path(), RunnerOptions{true, 4});
  const auto meta = read_metadata(run_file(result_dir(dir.path(), "meta", 10), 0, ".json"));
  EXPECT_EQ(meta.at("config"), to_json(c));
  EXPECT_EQ(meta.at("suite_index").get<int>(), 4);
  EXPECT_EQ(meta.at("counters").at("enqueued").get<std::uint64_t>(), 100u);
}

TEST(SweepDepths, OneDepthEqualsRunConfig) {
  TempDir dir;
  auto c = small_config("s", ProbeKind::None, 10, 1);
  c.workload.depth = 1;
  const std::vector<std::int64_t> depths{1};
  const auto sets = sweep_depths(c, depths, dir.path());
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].depth, 1);
  EXPECT_TRUE(std::filesystem::exists(run_file(result_dir(dir.path(), "s", 1), 0, ".csv")));
}

TEST(SweepDepths, OneSetPerDepth) {
  TempDir dir;
  const std::vector<std::int64_t> depths{2, 4, 8, 16, 32, 64, 128};
  const auto sets = sweep_depths(small_config("s", ProbeKind::None, 10, 1), depths, dir.path());
  ASSERT_EQ(sets.size(), 7u);
  for (std::size_t i = 0; i < depths.size(); ++i) EXPECT_EQ(sets[i].depth, depths[i]);
  EXPECT_THROW(sweep_depths(small_config("s", ProbeKind::None, 10, 1), std::vector<std::int64_t>{0}, dir.path()),
               std::invalid_argument);
}

TEST(LoadResults, RoundTripsRunnerOutput) {
  TempDir dir;
  run_config(small_config("b", ProbeKind::None, 30, 2), dir.path(), RunnerOptions{true, 1});
  run_config(small_config("a", ProbeKind::DirectDuration, 30, 1), dir.path(), RunnerOptions{true, 0});
  const auto sets = load_results(dir.path());
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].config_id, "a");
  EXPECT_EQ(sets[1].config_id, "b");
  EXPECT_EQ(sets[1].runs.size(), 2u);
  EXPECT_EQ(sets[0].runs[0].counters.enqueued, 300u);
  EXPECT_EQ(pooled_samples(sets[1]).size(), 30u);
}

TEST(LoadResults, CorruptCsvNamesFileAndLine) {
  TempDir dir;
  run_config(small_config("c", ProbeKind::None, 5, 1), dir.path());
  const auto csv = run_file(result_dir(dir.path(), "c", 10), 0, ".csv");
  auto lines = testing_support::read_lines(csv);
  lines[3] = "c,0,2,notanumber";
  {
    std::ofstream out(csv);
    for (const auto& l : lines) out << l << '\n';
  }
  try {
    load_results(dir.path());
    FAIL() << "expected ResultFormatError";
  } catch (const ResultFormatError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(csv.string() + ":4"), std::string::npos) << msg;
  }
}

TEST(LoadResults, TruncatedCsvIsRejected) {
  TempDir dir;
  run_config(small_config("t", ProbeKind::None, 5, 1), dir.path());
  const auto csv = run_file(result_dir(dir.path(), "t", 10), 0, ".csv");
  auto lines = testing_support::read_lines(csv);
  lines.pop_back();
  {
    std::ofstream out(csv);
    for (const auto& l : lines) out << l << '\n';
  }
  EXPECT_THROW(load_results(dir.path()), ResultFormatError);
}

TEST(LoadResults, MissingDirectory) { EXPECT_THROW(load_results("/nonexistent/results"), ResultFormatError); }

TEST(RunConfig, FailedChildIsFlagged) {
  TempDir dir;
  auto c = small_config("f", ProbeKind::DirectFull, 10, 1);
  const auto run_dir = result_dir(dir.path(), "f", 10);
  std::filesystem::create_directories(run_dir);
  // a directory where the log file should go makes the child's pipeline fail to start
  std::filesystem::create_directories(run_file(run_dir, 0, ".log"));
  const auto set = run_config(c, dir.path());
  ASSERT_EQ(set.runs.size(), 1u);
  EXPECT_TRUE(set.failed());
  EXPECT_FALSE(set.runs[0].failure.empty());
}

TEST(SweepDepths, UninstrumentedCostGrowsWithDepth) {
  TempDir dir;
  const std::vector<std::int64_t> depths{1, 64, 512};
  const auto sets = sweep_depths(small_config("n", ProbeKind::None, 4000, 1), depths, dir.path());
  std::vector<double> medians;
  for (const auto& s : sets) {
    const auto samples = pooled_samples(s);
    medians.push_back(summarize(std::span<const std::int64_t>(samples)).median);
  }
  EXPECT_LT(medians[0], medians[1]);
  EXPECT_LT(medians[1], medians[2]);
}
