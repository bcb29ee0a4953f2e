#pragma once

// Component selectors shared by the pipeline, the probes and the CLI.

#include <array>
#include <optional>
#include <string_view>
#include <utility>

namespace minimon {

enum class ProbeKind { None, InterceptorFull, DirectFull, DirectDuration, DirectAggregating };

enum class QueueKind { BlockingLinked, SyncRing };

enum class WriterKind { File, Null };

namespace detail {

template <class E, std::size_t N>
constexpr std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                                  std::string_view name) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  return std::nullopt;
}

template <class E, std::size_t N>
constexpr std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table,
                                   E value) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "?";
}

inline constexpr std::array<std::pair<ProbeKind, std::string_view>, 5> probe_names{{
    {ProbeKind::None, "none"},
    {ProbeKind::InterceptorFull, "interceptor-full"},
    {ProbeKind::DirectFull, "direct-full"},
    {ProbeKind::DirectDuration, "direct-duration"},
    {ProbeKind::DirectAggregating, "direct-aggregating"},
}};

inline constexpr std::array<std::pair<QueueKind, std::string_view>, 2> queue_names{{
    {QueueKind::BlockingLinked, "blocking-linked"},
    {QueueKind::SyncRing, "sync-ring"},
}};

inline constexpr std::array<std::pair<WriterKind, std::string_view>, 2> writer_names{{
    {WriterKind::File, "file"},
    {WriterKind::Null, "null"},
}};

}  // namespace detail

constexpr std::string_view to_string(ProbeKind k) { return detail::name_of(detail::probe_names, k); }
constexpr std::string_view to_string(QueueKind k) { return detail::name_of(detail::queue_names, k); }
constexpr std::string_view to_string(WriterKind k) { return detail::name_of(detail::writer_names, k); }

constexpr std::optional<ProbeKind> parse_probe_kind(std::string_view s) {
  return detail::lookup(detail::probe_names, s);
}
constexpr std::optional<QueueKind> parse_queue_kind(std::string_view s) {
  return detail::lookup(detail::queue_names, s);
}
constexpr std::optional<WriterKind> parse_writer_kind(std::string_view s) {
  return detail::lookup(detail::writer_names, s);
}

}  // namespace minimon
