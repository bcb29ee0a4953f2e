#pragma once

/**
 * @file record.hpp
 * Monitoring record kinds and their line-oriented text format.
 *
 * One record per line, fields separated by ';', kind tag first:
 *
 *     OER;signature;tin;tout;trace_id;eoi;ess;hostname;session_id
 *     DUR;signature;duration
 *     AGG;signature;count;sum_duration
 *
 * Numbers are base-10 integers (nanoseconds for times). Text fields must not
 * contain ';' or control characters.
 */

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace minimon {

/// Full execution record: timestamps plus the trace metadata needed to rebuild call trees.
struct FullRecord {
  std::string signature;
  std::int64_t tin = 0;
  std::int64_t tout = 0;
  std::int64_t trace_id = 0;
  std::int64_t eoi = 0;
  std::int64_t ess = 0;
  std::string hostname;
  std::string session_id;

  bool operator==(const FullRecord&) const = default;
};

/// Method name and elapsed time, nothing else.
struct DurationRecord {
  std::string signature;
  std::int64_t duration = 0;

  bool operator==(const DurationRecord&) const = default;
};

/// Sum and count of durations over one aggregation window.
struct AggregatedRecord {
  std::string signature;
  std::int64_t count = 1;
  std::int64_t sum_duration = 0;

  double mean_duration() const { return static_cast<double>(sum_duration) / static_cast<double>(count); }

  bool operator==(const AggregatedRecord&) const = default;
};

using MonitoringRecord = std::variant<FullRecord, DurationRecord, AggregatedRecord>;

class RecordFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr auto kForbiddenChars = [] {
  std::array<bool, 256> table{};
  for (int c = 0; c < 0x20; ++c) table[c] = true;
  table[0x7f] = true;
  table[static_cast<unsigned char>(';')] = true;
  return table;
}();

inline bool valid_text_field(std::string_view s) noexcept {
  bool bad = false;
  for (const char c : s) bad |= kForbiddenChars[static_cast<unsigned char>(c)];
  return !bad;
}

inline void require_text(std::string_view field, std::string_view value) {
  if (!valid_text_field(value)) {
    throw RecordFormatError("record field '" + std::string(field) +
                            "' contains a delimiter or control character");
  }
}

inline void validate(const FullRecord& r) {
  require_text("signature", r.signature);
  require_text("hostname", r.hostname);
  require_text("session_id", r.session_id);
  if (r.tout < r.tin) throw RecordFormatError("full record has tout < tin");
  if (r.eoi < 0 || r.ess < 0) throw RecordFormatError("full record has negative eoi/ess");
  if (r.trace_id < 0) throw RecordFormatError("full record has negative trace id");
}

inline void validate(const DurationRecord& r) {
  require_text("signature", r.signature);
  if (r.duration < 0) throw RecordFormatError("duration record has negative duration");
}

inline void validate(const AggregatedRecord& r) {
  require_text("signature", r.signature);
  if (r.count < 1) throw RecordFormatError("aggregated record has count < 1");
  if (r.sum_duration < 0) throw RecordFormatError("aggregated record has negative sum");
}

/// Writes fields into `out` in place: grow once, then copy and format directly.
class LineBuilder {
 public:
  LineBuilder(std::string& out, std::size_t max_len) : out_(out), base_(out.size()) {
    out_.resize(base_ + max_len);
    cursor_ = out_.data() + base_;
  }
  ~LineBuilder() { out_.resize(static_cast<std::size_t>(cursor_ - out_.data())); }
  LineBuilder(const LineBuilder&) = delete;
  LineBuilder& operator=(const LineBuilder&) = delete;

  LineBuilder& text(std::string_view s) {
    std::memcpy(cursor_, s.data(), s.size());
    cursor_ += s.size();
    return *this;
  }
  LineBuilder& sep() {
    *cursor_++ = ';';
    return *this;
  }
  LineBuilder& number(std::int64_t v) {
    cursor_ = std::to_chars(cursor_, cursor_ + kMaxIntChars, v).ptr;
    return *this;
  }

  static constexpr std::size_t kMaxIntChars = 20;

 private:
  std::string& out_;
  std::size_t base_;
  char* cursor_;
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(';', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] inline void parse_fail(std::string_view line, std::string_view why) {
  throw RecordFormatError(std::string(why) + ": \"" + std::string(line) + "\"");
}

inline std::int64_t parse_int(std::string_view line, std::string_view field) {
  std::int64_t v = 0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
    parse_fail(line, "non-numeric field '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace detail

/// Appends the serialized record (without newline) to `out`.
inline void serialize_to(const MonitoringRecord& record, std::string& out) {
  constexpr std::size_t kNum = detail::LineBuilder::kMaxIntChars;
  std::visit(
      [&out](const auto& r) {
        detail::validate(r);
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, FullRecord>) {
          detail::LineBuilder line(out, 4 + r.signature.size() + r.hostname.size() + r.session_id.size() + 5 * kNum + 8);
          line.text("OER;").text(r.signature).sep().number(r.tin).sep().number(r.tout).sep();
          line.number(r.trace_id).sep().number(r.eoi).sep().number(r.ess).sep();
          line.text(r.hostname).sep().text(r.session_id);
        } else if constexpr (std::is_same_v<R, DurationRecord>) {
          detail::LineBuilder line(out, 4 + r.signature.size() + kNum + 1);
          line.text("DUR;").text(r.signature).sep().number(r.duration);
        } else {
          detail::LineBuilder line(out, 4 + r.signature.size() + 2 * kNum + 2);
          line.text("AGG;").text(r.signature).sep().number(r.count).sep().number(r.sum_duration);
        }
      },
      record);
}

inline std::string serialize(const MonitoringRecord& record) {
  std::string out;
  serialize_to(record, out);
  return out;
}

inline MonitoringRecord deserialize(std::string_view line) {
  using detail::parse_fail;
  using detail::parse_int;
  const auto f = detail::split_fields(line);
  const std::string_view tag = f.front();
  MonitoringRecord result;
  if (tag == "OER") {
    if (f.size() != 9) parse_fail(line, "OER record needs 9 fields");
    result = FullRecord{std::string(f[1]), parse_int(line, f[2]), parse_int(line, f[3]),
                        parse_int(line, f[4]), parse_int(line, f[5]),  parse_int(line, f[6]),
                        std::string(f[7]), std::string(f[8])};
  } else if (tag == "DUR") {
    if (f.size() != 3) parse_fail(line, "DUR record needs 3 fields");
    result = DurationRecord{std::string(f[1]), parse_int(line, f[2])};
  } else if (tag == "AGG") {
    if (f.size() != 4) parse_fail(line, "AGG record needs 4 fields");
    result = AggregatedRecord{std::string(f[1]), parse_int(line, f[2]), parse_int(line, f[3])};
  } else {
    parse_fail(line, "unknown record tag");
  }
  try {
    std::visit([](const auto& r) { detail::validate(r); }, result);
  } catch (const RecordFormatError& e) {
    parse_fail(line, e.what());
  }
  return result;
}

inline const std::string& signature_of(const MonitoringRecord& record) {
  return std::visit([](const auto& r) -> const std::string& { return r.signature; }, record);
}

}  // namespace minimon
