#pragma once

// Per-thread control-flow bookkeeping: trace id, execution order index (eoi)
// and execution stack size (ess). A trace starts explicitly and ends when the
// stack size drops back to zero.

#include <atomic>
#include <cstdint>
#include <stdexcept>

namespace minimon::trace {

inline constexpr std::int64_t kNoTrace = -1;

struct TraceContext {
  std::int64_t trace_id = kNoTrace;
  std::int64_t next_eoi = 0;
  std::int64_t ess = 0;
};

struct MethodEntry {
  std::int64_t eoi;
  std::int64_t ess;
};

namespace detail {
inline std::atomic<std::int64_t> next_trace_id{0};
inline thread_local TraceContext context;
}  // namespace detail

inline const TraceContext& current_context() noexcept { return detail::context; }

inline std::int64_t recall_trace_id() noexcept { return detail::context.trace_id; }

/// Allocates the next process-wide trace id for the calling thread.
inline std::int64_t begin_trace() {
  auto& ctx = detail::context;
  if (ctx.trace_id != kNoTrace) throw std::logic_error("begin_trace: trace already active");
  ctx.trace_id = detail::next_trace_id.fetch_add(1, std::memory_order_relaxed);
  ctx.next_eoi = 0;
  ctx.ess = 0;
  return ctx.trace_id;
}

inline MethodEntry enter_method() {
  auto& ctx = detail::context;
  if (ctx.trace_id == kNoTrace) throw std::logic_error("enter_method: no active trace");
  return MethodEntry{ctx.next_eoi++, ctx.ess++};
}

inline void exit_method() {
  auto& ctx = detail::context;
  if (ctx.ess <= 0) throw std::logic_error("exit_method: no matching enter_method");
  if (--ctx.ess == 0) ctx = TraceContext{};
}

}  // namespace minimon::trace
