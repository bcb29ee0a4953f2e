#pragma once

/**
 * @file probes.hpp
 * Measurement code placed at method entry and exit.
 *
 * Direct probes are plain inline statements at the call site (enter/exit
 * pairs, or the RAII scopes below) with the signature as a constant. The
 * interceptor probe wraps a callable behind a virtual interceptor interface,
 * the way weaving frameworks route calls through a join point: per call it
 * allocates a context, boxes the arguments, rebuilds the signature text from
 * the reflective method description, checks probe activation by signature,
 * and reaches the wrapped body through an extra indirect call.
 */

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "minimon/clock.hpp"
#include "minimon/pipeline.hpp"
#include "minimon/record.hpp"
#include "minimon/trace_registry.hpp"

namespace minimon {

// ---------------------------------------------------------------------------
// Full records
// ---------------------------------------------------------------------------

struct FullProbeToken {
  std::string_view signature;
  std::int64_t trace_id;
  std::int64_t eoi;
  std::int64_t ess;
  std::int64_t tin;
};

inline FullProbeToken direct_full_enter(std::string_view signature) {
  std::int64_t trace_id = trace::recall_trace_id();
  if (trace_id == trace::kNoTrace) trace_id = trace::begin_trace();
  const trace::MethodEntry entry = trace::enter_method();
  return FullProbeToken{signature, trace_id, entry.eoi, entry.ess, now_ns()};
}

inline void direct_full_exit(Pipeline& pipeline, const FullProbeToken& token) {
  const std::int64_t tout = now_ns();
  pipeline.new_monitoring_record(FullRecord{std::string(token.signature), token.tin, tout, token.trace_id,
                                            token.eoi, token.ess, pipeline.hostname(), pipeline.session_id()});
  trace::exit_method();
}

class FullProbeScope {
 public:
  FullProbeScope(Pipeline& pipeline, std::string_view signature)
      : pipeline_(pipeline), token_(direct_full_enter(signature)) {}
  ~FullProbeScope() { direct_full_exit(pipeline_, token_); }
  FullProbeScope(const FullProbeScope&) = delete;
  FullProbeScope& operator=(const FullProbeScope&) = delete;

 private:
  Pipeline& pipeline_;
  FullProbeToken token_;
};

// ---------------------------------------------------------------------------
// Duration records
// ---------------------------------------------------------------------------

struct DurationProbeToken {
  std::string_view signature;
  std::int64_t tin;
};

inline DurationProbeToken direct_duration_enter(std::string_view signature) noexcept {
  return DurationProbeToken{signature, now_ns()};
}

inline void direct_duration_exit(Pipeline& pipeline, const DurationProbeToken& token) {
  const std::int64_t tout = now_ns();
  pipeline.new_monitoring_record(DurationRecord{std::string(token.signature), tout - token.tin});
}

class DurationProbeScope {
 public:
  DurationProbeScope(Pipeline& pipeline, std::string_view signature)
      : pipeline_(pipeline), token_(direct_duration_enter(signature)) {}
  ~DurationProbeScope() { direct_duration_exit(pipeline_, token_); }
  DurationProbeScope(const DurationProbeScope&) = delete;
  DurationProbeScope& operator=(const DurationProbeScope&) = delete;

 private:
  Pipeline& pipeline_;
  DurationProbeToken token_;
};

// ---------------------------------------------------------------------------
// Windowed aggregation
// ---------------------------------------------------------------------------

/// Sum/count pair owned by one probe site on one thread.
struct AggregationState {
  std::string signature;
  std::int64_t window = kDefaultAggregationWindow;
  std::int64_t counter = 0;
  std::int64_t sum = 0;

  AggregationState() = default;
  AggregationState(std::string sig, std::int64_t w) : signature(std::move(sig)), window(w) {
    if (w < 1) throw std::invalid_argument("aggregation window must be >= 1");
  }
};

/// Adds one duration; returns a record and resets the state once `window` durations are in.
inline std::optional<AggregatedRecord> aggregate_duration(AggregationState& state, std::int64_t duration) {
  state.sum += duration;
  if (++state.counter < state.window) return std::nullopt;
  AggregatedRecord out{state.signature, state.counter, state.sum};
  state.counter = 0;
  state.sum = 0;
  return out;
}

/// Emits a partial window (count < window) if anything is pending.
inline std::optional<AggregatedRecord> flush_residual(AggregationState& state) {
  if (state.counter == 0) return std::nullopt;
  AggregatedRecord out{state.signature, state.counter, state.sum};
  state.counter = 0;
  state.sum = 0;
  return out;
}

inline void direct_aggregating_exit(Pipeline& pipeline, AggregationState& state, std::int64_t tin) {
  const std::int64_t tout = now_ns();
  if (auto record = aggregate_duration(state, tout - tin)) pipeline.new_monitoring_record(std::move(*record));
}

class AggregatingProbeScope {
 public:
  AggregatingProbeScope(Pipeline& pipeline, AggregationState& state)
      : pipeline_(pipeline), state_(state), tin_(now_ns()) {}
  ~AggregatingProbeScope() { direct_aggregating_exit(pipeline_, state_, tin_); }
  AggregatingProbeScope(const AggregatingProbeScope&) = delete;
  AggregatingProbeScope& operator=(const AggregatingProbeScope&) = delete;

 private:
  Pipeline& pipeline_;
  AggregationState& state_;
  std::int64_t tin_;
};

// ---------------------------------------------------------------------------
// Interceptor
// ---------------------------------------------------------------------------

/**
 * Reflective description of an intercepted method, split the way a join
 * point exposes it. long_string() rebuilds the full signature text.
 * Signatures that do not fit the "modifiers return type.name(params)" shape
 * are kept verbatim.
 */
struct MethodDescriptor {
  std::vector<std::string> modifiers;
  std::string return_type;
  std::string declaring_type;
  std::string name;
  std::vector<std::string> parameter_types;
  bool verbatim = false;

  static MethodDescriptor parse(std::string_view signature) {
    MethodDescriptor d = parse_parts(signature);
    if (d.verbatim || d.long_string() != signature) {
      d = MethodDescriptor{};
      d.name = std::string(signature);
      d.verbatim = true;
    }
    return d;
  }

  std::string long_string() const {
    if (verbatim) return name;
    std::string out;
    for (const auto& m : modifiers) {
      out += m;
      out += ' ';
    }
    out += return_type;
    out += ' ';
    out += declaring_type;
    out += '.';
    out += name;
    out += '(';
    for (std::size_t i = 0; i < parameter_types.size(); ++i) {
      if (i > 0) out += ", ";
      out += parameter_types[i];
    }
    out += ')';
    return out;
  }

 private:
  static MethodDescriptor parse_parts(std::string_view sig) {
    MethodDescriptor d;
    d.verbatim = true;
    const auto open = sig.find('(');
    if (open == std::string_view::npos || sig.empty() || sig.back() != ')') return d;
    std::string_view head = sig.substr(0, open);
    std::string_view params = sig.substr(open + 1, sig.size() - open - 2);
    std::vector<std::string_view> words;
    while (!head.empty()) {
      const auto sp = head.find(' ');
      words.push_back(head.substr(0, sp));
      if (sp == std::string_view::npos) break;
      head.remove_prefix(sp + 1);
    }
    if (words.size() < 2) return d;
    const std::string_view qualified = words.back();
    const auto dot = qualified.rfind('.');
    if (dot == std::string_view::npos) return d;
    d.declaring_type = std::string(qualified.substr(0, dot));
    d.name = std::string(qualified.substr(dot + 1));
    d.return_type = std::string(words[words.size() - 2]);
    for (std::size_t i = 0; i + 2 < words.size(); ++i) d.modifiers.emplace_back(words[i]);
    while (!params.empty()) {
      const auto comma = params.find(", ");
      d.parameter_types.emplace_back(params.substr(0, comma));
      if (comma == std::string_view::npos) break;
      params.remove_prefix(comma + 2);
    }
    d.verbatim = false;
    return d;
  }
};

/// Per-invocation context; one heap allocation per intercepted call.
struct CallContext {
  std::shared_ptr<const MethodDescriptor> method;
  std::vector<std::string> arguments;
  std::string signature;  ///< filled by the interceptor from `method`
  std::optional<FullProbeToken> token;
};

/// Signature-keyed activation switches; every signature is active unless deactivated.
class ProbeActivation {
 public:
  bool is_active(const std::string& signature) {
    {
      std::shared_lock lock(mutex_);
      if (const auto it = cache_.find(signature); it != cache_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    return cache_.try_emplace(signature, true).first->second;
  }

  void set_active(const std::string& signature, bool active) {
    std::unique_lock lock(mutex_);
    cache_[signature] = active;
  }

 private:
  std::shared_mutex mutex_;
  std::unordered_map<std::string, bool> cache_;
};

class Interceptor {
 public:
  virtual ~Interceptor() = default;
  virtual void before(CallContext& context) = 0;
  /// Runs on normal return and on unwinding; must not throw.
  virtual void after(CallContext& context) noexcept = 0;

  std::uint64_t contexts_created() const noexcept { return contexts_created_.load(std::memory_order_relaxed); }
  void count_context() noexcept { contexts_created_.fetch_add(1, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> contexts_created_{0};
};

/// Emits the same FullRecord a direct full probe would, for active signatures.
class FullRecordInterceptor final : public Interceptor {
 public:
  explicit FullRecordInterceptor(Pipeline& pipeline) : pipeline_(pipeline) {}

  void before(CallContext& context) override {
    context.signature = context.method->long_string();
    if (!activation_.is_active(context.signature)) return;
    context.token = direct_full_enter(context.signature);
  }

  void after(CallContext& context) noexcept override {
    if (!context.token) return;
    try {
      direct_full_exit(pipeline_, *context.token);
    } catch (...) {
    }
  }

  ProbeActivation& activation() noexcept { return activation_; }

 private:
  Pipeline& pipeline_;
  ProbeActivation activation_;
};

namespace detail {

template <class A>
std::string describe_argument(const A& arg) {
  if constexpr (std::is_arithmetic_v<std::decay_t<A>>) {
    return std::to_string(arg);
  } else if constexpr (requires(std::ostream& os) { os << arg; }) {
    std::ostringstream os;
    os << arg;
    return os.str();
  } else {
    return "<" + std::string(typeid(A).name()) + ">";
  }
}

template <class R>
class JoinPoint {
 public:
  JoinPoint(CallContext& context, std::function<R()> body) : context_(context), body_(std::move(body)) {}
  R proceed() { return body_(); }
  CallContext& context() { return context_; }

 private:
  CallContext& context_;
  std::function<R()> body_;
};

}  // namespace detail

/**
 * Wraps `wrapped` so every call goes through `interceptor`: allocate a
 * CallContext, before(), proceed through a JoinPoint, after(). after() also
 * runs when `wrapped` throws.
 */
template <class R, class... Args>
std::function<R(Args...)> intercept(std::function<R(Args...)> wrapped, std::string signature,
                                    std::shared_ptr<Interceptor> interceptor) {
  auto method = std::make_shared<const MethodDescriptor>(MethodDescriptor::parse(signature));
  return [wrapped = std::move(wrapped), method = std::move(method),
          interceptor = std::move(interceptor)](Args... args) -> R {
    auto context = std::make_unique<CallContext>();
    interceptor->count_context();
    context->method = method;
    context->arguments.reserve(sizeof...(Args));
    (context->arguments.push_back(detail::describe_argument(args)), ...);

    interceptor->before(*context);
    struct AfterGuard {
      Interceptor& interceptor;
      CallContext& context;
      ~AfterGuard() { interceptor.after(context); }
    } guard{*interceptor, *context};

    detail::JoinPoint<R> join_point(*context, [&wrapped, &args...]() -> R { return wrapped(args...); });
    return join_point.proceed();
  };
}

}  // namespace minimon
