#pragma once

// Subcommands behind the `minimon` executable. Each returns a process exit
// code and writes human-readable output to the given streams.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "minimon/bench_runner.hpp"
#include "minimon/benchmark_config.hpp"
#include "minimon/report.hpp"
#include "minimon/stats.hpp"

namespace minimon {

inline constexpr const char* kOutputDirEnv = "MINIMON_OUT";
inline constexpr const char* kSummaryCsvName = "summary.csv";

/// --out flag, then $MINIMON_OUT, then the suite's output_dir.
inline std::optional<std::filesystem::path> resolve_output_dir(const std::optional<std::string>& flag,
                                                               const SuiteConfig* suite) {
  if (flag && !flag->empty()) return std::filesystem::path(*flag);
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  if (suite != nullptr && !suite->output_dir.empty()) return std::filesystem::path(suite->output_dir);
  return std::nullopt;
}

inline void apply_paper_scale(SuiteConfig& suite) {
  for (auto& c : suite.configs) {
    c.iterations = kPaperIterations;
    c.runs = kPaperRuns;
  }
}

/// Post-warmup summary per result set. Labels get an "@d<depth>" suffix when a config has several depths.
inline std::vector<NamedSummary> summarize_results(std::span<const SampleSet> sets) {
  std::map<std::string, int> depth_count;
  for (const auto& s : sets) ++depth_count[s.config_id];
  std::vector<NamedSummary> out;
  for (const auto& s : sets) {
    const auto samples = pooled_samples(s);
    NamedSummary n;
    n.config_id = s.config_id;
    n.depth = s.depth;
    n.label = depth_count[s.config_id] > 1 ? s.config_id + "@d" + std::to_string(s.depth) : s.config_id;
    n.stats = summarize(std::span<const std::int64_t>(samples));
    out.push_back(std::move(n));
  }
  return out;
}

namespace detail {

inline bool report_set(const SampleSet& set, std::ostream& out, std::ostream& err) {
  bool ok = true;
  for (const auto& r : set.runs) {
    if (r.failed) {
      err << set.config_id << " d" << set.depth << " run " << r.run << " FAILED: " << r.failure << '\n';
      ok = false;
      continue;
    }
    if (r.counters.overwritten > 0) {
      err << "warning: " << set.config_id << " d" << set.depth << " run " << r.run << " lost "
          << r.counters.overwritten << " records to ring overwrite\n";
    }
  }
  out << set.config_id << " d" << set.depth << ": " << set.runs.size() << " run(s)" << (ok ? "" : " with failures")
      << '\n';
  return ok;
}

inline std::optional<SuiteConfig> load_suite_or_report(const std::string& file, std::ostream& err) {
  try {
    return load_suite(file);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
  }
  return std::nullopt;
}

}  // namespace detail

inline int cmd_run(const std::string& config_file, const std::optional<std::string>& out_flag, bool paper_scale,
                   std::ostream& out, std::ostream& err) {
  auto suite = detail::load_suite_or_report(config_file, err);
  if (!suite) return 2;
  if (paper_scale) apply_paper_scale(*suite);
  const auto root = resolve_output_dir(out_flag, &*suite);
  if (!root) {
    err << "no output directory: pass --out, set " << kOutputDirEnv << ", or set output_dir in the suite\n";
    return 2;
  }
  bool ok = true;
  try {
    std::filesystem::create_directories(*root);
    for (std::size_t i = 0; i < suite->configs.size(); ++i) {
      const auto set = run_config(suite->configs[i], *root, RunnerOptions{true, static_cast<int>(i)});
      ok = detail::report_set(set, out, err) && ok;
    }
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return 1;
  }
  return ok ? 0 : 1;
}

inline int cmd_sweep(const std::string& config_file, const std::vector<std::int64_t>& depth_flag,
                     const std::optional<std::string>& out_flag, bool paper_scale, std::ostream& out,
                     std::ostream& err) {
  auto suite = detail::load_suite_or_report(config_file, err);
  if (!suite) return 2;
  if (paper_scale) apply_paper_scale(*suite);
  const std::vector<std::int64_t> depths = depth_flag.empty() ? suite->depths : depth_flag;
  if (depths.empty()) {
    err << "no depths: pass --depths or set depths in the suite\n";
    return 2;
  }
  for (const auto d : depths) {
    if (d < 1) {
      err << "invalid depth " << d << ": depths must be >= 1\n";
      return 2;
    }
  }
  const auto root = resolve_output_dir(out_flag, &*suite);
  if (!root) {
    err << "no output directory: pass --out, set " << kOutputDirEnv << ", or set output_dir in the suite\n";
    return 2;
  }
  bool ok = true;
  try {
    std::filesystem::create_directories(*root);
    for (std::size_t i = 0; i < suite->configs.size(); ++i) {
      const auto sets = sweep_depths(suite->configs[i], depths, *root, RunnerOptions{true, static_cast<int>(i)});
      for (const auto& s : sets) ok = detail::report_set(s, out, err) && ok;
    }
  } catch (const std::exception& e) {
    err << "sweep failed: " << e.what() << '\n';
    return 1;
  }
  return ok ? 0 : 1;
}

inline int cmd_report(const std::string& in_dir, std::ostream& out, std::ostream& err) {
  std::vector<NamedSummary> summaries;
  std::vector<SampleSet> sets;
  try {
    sets = load_results(in_dir);
    if (sets.empty()) {
      err << in_dir << ": no benchmark results found\n";
      return 1;
    }
    summaries = summarize_results(sets);
  } catch (const std::exception& e) {
    err << "report failed: " << e.what() << '\n';
    return 1;
  }
  out << "Overhead per iteration (µs)\n\n" << render_table(summaries) << '\n';
  out << "Mean per monitored call (µs):\n";
  for (const auto& s : summaries) {
    out << "  " << s.label << " (d=" << s.depth << "): " << detail::fixed(per_call_mean(s.stats, s.depth), 4) << '\n';
  }
  const auto comparisons = pairwise_comparisons(summaries);
  if (!comparisons.empty()) out << "\nComparisons (95 % CI overlap):\n" << render_comparisons(comparisons);
  bool lost = false;
  for (const auto& s : sets) {
    for (const auto& r : s.runs) {
      if (r.counters.overwritten > 0 && !lost) {
        out << '\n';
        lost = true;
      }
      if (r.counters.overwritten > 0) {
        out << "data loss: " << s.config_id << " d" << s.depth << " run " << r.run << " overwrote "
            << r.counters.overwritten << " of " << r.counters.enqueued << " records\n";
      }
    }
  }
  const auto csv_path = std::filesystem::path(in_dir) / kSummaryCsvName;
  std::ofstream csv(csv_path);
  csv << render_summary_csv(summaries);
  if (!csv) {
    err << "cannot write " << csv_path.string() << '\n';
    return 1;
  }
  return 0;
}

inline int cmd_plot(const std::string& in_dir, const std::string& out_svg, std::ostream& out, std::ostream& err) {
  try {
    const auto sets = load_results(in_dir);
    if (sets.empty()) {
      err << in_dir << ": no benchmark results found\n";
      return 1;
    }
    const auto summaries = summarize_results(sets);
    const auto series = depth_series(summaries);
    const std::string svg = render_depth_chart(series);
    std::ofstream f(out_svg);
    f << svg;
    if (!f) {
      err << "cannot write " << out_svg << '\n';
      return 1;
    }
    out << "wrote " << out_svg << " (" << series.size() << " configurations)\n";
  } catch (const std::exception& e) {
    err << "plot failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace minimon
