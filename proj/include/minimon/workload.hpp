#pragma once

// The monitored application: a method that recurses `depth` times and busy
// waits at the leaf. Every level is one monitored invocation, so one call with
// depth d activates the probe exactly d times. Each level returns the leaf's
// entry timestamp; callers must consume it.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string_view>

#include "minimon/clock.hpp"
#include "minimon/kinds.hpp"
#include "minimon/pipeline.hpp"
#include "minimon/probes.hpp"

namespace minimon {

inline constexpr std::string_view kMonitoredSignature =
    "public final long minimon.workload.MonitoredClassSimple.monitoredMethod(long, int)";

struct WorkloadParams {
  std::int64_t depth = 10;
  std::int64_t busy_ns = 0;

  void validate() const {
    if (depth < 1) throw std::invalid_argument("workload depth must be >= 1");
    if (busy_ns < 0) throw std::invalid_argument("workload busy_ns must be >= 0");
  }
};

/// Spins on the monotonic clock; never sleeps.
inline std::int64_t busy_wait(std::int64_t busy_ns) noexcept {
  const std::int64_t entry = now_ns();
  if (busy_ns > 0) {
    while (now_ns() - entry < busy_ns) {
    }
  }
  return entry;
}

/**
 * The monitored class, instantiated once per probe style so the probe
 * statements are compiled straight into the method body. Thread-confined:
 * the aggregation counters belong to the instance.
 */
template <ProbeKind Kind>
class MonitoredClass {
 public:
  explicit MonitoredClass(Pipeline* pipeline) : pipeline_(pipeline) {
    if constexpr (Kind != ProbeKind::None) {
      if (pipeline_ == nullptr) throw std::invalid_argument("instrumented workload needs a pipeline");
    }
    if constexpr (Kind == ProbeKind::DirectAggregating) {
      aggregation_ = AggregationState(std::string(kMonitoredSignature), pipeline_->config().aggregation_window);
    }
    if constexpr (Kind == ProbeKind::InterceptorFull) {
      intercepted_ = intercept(std::function<std::int64_t(std::int64_t, std::int64_t)>(
                                   [this](std::int64_t t, std::int64_t d) { return body(t, d); }),
                               std::string(kMonitoredSignature), std::make_shared<FullRecordInterceptor>(*pipeline_));
    }
  }

  MonitoredClass(const MonitoredClass&) = delete;
  MonitoredClass& operator=(const MonitoredClass&) = delete;

  [[gnu::noinline]] std::int64_t monitored_method(std::int64_t busy_ns, std::int64_t depth) {
    if constexpr (Kind == ProbeKind::None) {
      return body(busy_ns, depth);
    } else if constexpr (Kind == ProbeKind::DirectFull) {
      FullProbeScope probe(*pipeline_, kMonitoredSignature);
      return body(busy_ns, depth);
    } else if constexpr (Kind == ProbeKind::DirectDuration) {
      DurationProbeScope probe(*pipeline_, kMonitoredSignature);
      return body(busy_ns, depth);
    } else if constexpr (Kind == ProbeKind::DirectAggregating) {
      AggregatingProbeScope probe(*pipeline_, aggregation_);
      return body(busy_ns, depth);
    } else {
      return intercepted_(busy_ns, depth);
    }
  }

  /// Hands a partially filled aggregation window to the pipeline.
  void flush() {
    if constexpr (Kind == ProbeKind::DirectAggregating) {
      if (auto record = flush_residual(aggregation_)) pipeline_->new_monitoring_record(std::move(*record));
    }
  }

  const AggregationState& aggregation_state() const noexcept { return aggregation_; }

 private:
  std::int64_t body(std::int64_t busy_ns, std::int64_t depth) {
    if (depth > 1) {
      const std::int64_t leaf = monitored_method(busy_ns, depth - 1);
      // keeps the recursion a real call chain instead of a sibling-call loop
      asm volatile("" : : "r"(leaf) : "memory");
      return leaf;
    }
    return busy_wait(busy_ns);
  }

  Pipeline* pipeline_;
  AggregationState aggregation_;
  std::function<std::int64_t(std::int64_t, std::int64_t)> intercepted_;
};

/// Calls `fn.template operator()<Kind>()` with `kind` lifted to a template argument.
template <class Fn>
decltype(auto) dispatch_probe_kind(ProbeKind kind, Fn&& fn) {
  switch (kind) {
    case ProbeKind::None:
      return fn.template operator()<ProbeKind::None>();
    case ProbeKind::InterceptorFull:
      return fn.template operator()<ProbeKind::InterceptorFull>();
    case ProbeKind::DirectFull:
      return fn.template operator()<ProbeKind::DirectFull>();
    case ProbeKind::DirectDuration:
      return fn.template operator()<ProbeKind::DirectDuration>();
    case ProbeKind::DirectAggregating:
      return fn.template operator()<ProbeKind::DirectAggregating>();
  }
  throw std::invalid_argument("unknown probe kind");
}

}  // namespace minimon
