#include <gtest/gtest.h>

#include <thread>

#include "minimon/workload.hpp"
#include "test_support.hpp"

using namespace minimon;
using testing_support::TempDir;

namespace {

template <ProbeKind Kind>
std::vector<MonitoringRecord> records_for(std::int64_t busy, std::int64_t depth, std::int64_t window = 1000) {
  TempDir dir;
  auto config = testing_support::file_pipeline(dir / "log");
  config.aggregation_window = window;
  config.probe = Kind;
  Pipeline p(config);
  p.start();
  std::thread([&] {
    MonitoredClass<Kind> app(&p);
    app.monitored_method(busy, depth);
    app.flush();
  }).join();
  p.shutdown();
  return testing_support::read_records(dir / "log");
}

}  // namespace

TEST(Workload, DepthOneIsOneActivation) {
  EXPECT_EQ(records_for<ProbeKind::DirectFull>(0, 1).size(), 1u);
  EXPECT_EQ(records_for<ProbeKind::DirectDuration>(0, 1).size(), 1u);
  EXPECT_EQ(records_for<ProbeKind::InterceptorFull>(0, 1).size(), 1u);
}

TEST(Workload, DepthTenIsTenActivations) {
  EXPECT_EQ(records_for<ProbeKind::DirectFull>(0, 10).size(), 10u);
  EXPECT_EQ(records_for<ProbeKind::DirectDuration>(0, 10).size(), 10u);
  EXPECT_EQ(records_for<ProbeKind::InterceptorFull>(0, 10).size(), 10u);
  const auto agg = records_for<ProbeKind::DirectAggregating>(0, 10);
  ASSERT_EQ(agg.size(), 1u);
  EXPECT_EQ(std::get<AggregatedRecord>(agg[0]).count, 10);
}

TEST(Workload, AggregationWindowAcrossLevels) {
  const auto agg = records_for<ProbeKind::DirectAggregating>(0, 10, 4);
  ASSERT_EQ(agg.size(), 3u);
  EXPECT_EQ(std::get<AggregatedRecord>(agg[2]).count, 2);
}

TEST(Workload, SignatureIsStable) {
  for (const auto& r : records_for<ProbeKind::InterceptorFull>(0, 3)) EXPECT_EQ(signature_of(r), kMonitoredSignature);
  for (const auto& r : records_for<ProbeKind::DirectFull>(0, 3)) EXPECT_EQ(signature_of(r), kMonitoredSignature);
}

TEST(Workload, BusyWaitLowerBound) {
  MonitoredClass<ProbeKind::None> app(nullptr);
  for (int i = 0; i < 20; ++i) {
    const auto t0 = now_ns();
    const auto leaf = app.monitored_method(1000, 1);
    const auto t1 = now_ns();
    EXPECT_GE(t1 - t0, 1000);
    EXPECT_GE(leaf, t0);
    EXPECT_LE(leaf, t1);
  }
}

TEST(Workload, ReturnsLeafTimestamp) {
  MonitoredClass<ProbeKind::None> app(nullptr);
  const auto t0 = now_ns();
  const auto leaf = app.monitored_method(0, 50);
  EXPECT_GE(leaf, t0);
}

TEST(Workload, InstrumentedNeedsPipeline) {
  EXPECT_THROW(MonitoredClass<ProbeKind::DirectFull>(nullptr), std::invalid_argument);
}

TEST(Workload, ParamsValidate) {
  EXPECT_THROW((WorkloadParams{0, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((WorkloadParams{1, -1}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((WorkloadParams{1, 0}.validate()));
}

TEST(Workload, DispatchProbeKind) {
  for (auto k : {ProbeKind::None, ProbeKind::InterceptorFull, ProbeKind::DirectFull, ProbeKind::DirectDuration,
                 ProbeKind::DirectAggregating}) {
    EXPECT_EQ(dispatch_probe_kind(k, []<ProbeKind K>() { return K; }), k);
  }
}
