#pragma once

/**
 * @file bench_runner.hpp
 * Runs benchmark configurations, one fresh child process per run.
 *
 * Output layout under the result root:
 *
 *     <config_id>/d<depth>/run-<k>.csv    config_id,run,iteration,duration_ns
 *     <config_id>/d<depth>/run-<k>.json   config echo, pid, pipeline counters, ...
 *     <config_id>/d<depth>/run-<k>.log    monitoring log (file writer only)
 *
 * A sample is the duration of one root call to the monitored method minus the
 * configured leaf busy time.
 */

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minimon/benchmark_config.hpp"
#include "minimon/clock.hpp"
#include "minimon/pipeline.hpp"
#include "minimon/workload.hpp"

namespace minimon {

namespace fs = std::filesystem;

class ResultFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunResult {
  int run = 0;
  long pid = 0;
  bool failed = false;
  std::string failure;
  std::vector<std::int64_t> samples_ns;
  PipelineReport counters;
  std::int64_t checksum = 0;
  std::int64_t clock_resolution_ns = 0;
};

struct SampleSet {
  std::string config_id;
  std::int64_t depth = 0;
  int suite_index = 0;
  double warmup_fraction = kDefaultWarmupFraction;
  BenchmarkConfig config;
  std::vector<RunResult> runs;

  bool failed() const {
    return std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.failed; });
  }
};

struct RunnerOptions {
  /// Fresh child process per run. Off only for in-process debugging.
  bool fork_per_run = true;
  int suite_index = 0;
};

inline fs::path result_dir(const fs::path& root, const std::string& config_id, std::int64_t depth) {
  return root / config_id / ("d" + std::to_string(depth));
}

inline fs::path run_file(const fs::path& dir, int run, const char* ext) {
  return dir / ("run-" + std::to_string(run) + ext);
}

/// Drops the first floor(fraction * n) samples.
template <class T>
std::vector<T> discard_warmup(std::span<const T> samples, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw std::invalid_argument("warmup fraction must be in [0, 1)");
  const auto drop = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(samples.size())));
  return std::vector<T>(samples.begin() + static_cast<std::ptrdiff_t>(drop), samples.end());
}

template <class T>
std::vector<T> discard_warmup(const std::vector<T>& samples, double fraction) {
  return discard_warmup(std::span<const T>(samples), fraction);
}

namespace detail {

template <ProbeKind Kind>
std::int64_t timed_loop(Pipeline& pipeline, const WorkloadParams& workload, std::span<std::int64_t> samples) {
  MonitoredClass<Kind> app(&pipeline);
  std::int64_t checksum = 0;
  const std::int64_t busy = workload.busy_ns;
  const std::int64_t depth = workload.depth;
  for (auto& sample : samples) {
    const std::int64_t start = now_ns();
    checksum += app.monitored_method(busy, depth);
    sample = now_ns() - start - busy;
  }
  app.flush();
  return checksum;
}

inline void write_samples_csv(const fs::path& path, const std::string& config_id, int run,
                              std::span<const std::int64_t> samples) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) throw std::runtime_error("cannot write " + path.string());
  std::setvbuf(f, nullptr, _IOFBF, 1 << 20);
  std::fputs("config_id,run,iteration,duration_ns\n", f);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::fprintf(f, "%s,%d,%zu,%lld\n", config_id.c_str(), run, i, static_cast<long long>(samples[i]));
  }
  if (std::fclose(f) != 0) throw std::runtime_error("cannot write " + path.string());
}

inline nlohmann::json counters_json(const PipelineReport& r) {
  return {{"enqueued", r.enqueued},
          {"written", r.written},
          {"overwritten", r.overwritten},
          {"dropped", r.dropped},
          {"rejected", r.rejected}};
}

inline std::int64_t parse_field(const std::string& file, std::size_t line_no, std::string_view field) {
  std::int64_t v = 0;
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
    throw ResultFormatError(file + ":" + std::to_string(line_no) + ": non-numeric field '" +
                            std::string(field) + "'");
  }
  return v;
}

}  // namespace detail

/// One benchmark run in the current process: start pipeline, time n iterations, persist.
inline RunResult execute_run(const BenchmarkConfig& config, int run, const fs::path& dir, int suite_index = 0) {
  config.validate();
  fs::create_directories(dir);
  PipelineConfig pc = config.pipeline;
  if (pc.writer == WriterKind::File) pc.output_path = run_file(dir, run, ".log");

  RunResult result;
  result.run = run;
  result.pid = static_cast<long>(::getpid());
  result.clock_resolution_ns = estimate_clock_resolution_ns();
  result.samples_ns.assign(static_cast<std::size_t>(config.iterations), 0);

  Pipeline pipeline(pc);
  pipeline.start();
  result.checksum = dispatch_probe_kind(config.pipeline.probe, [&]<ProbeKind Kind>() {
    return detail::timed_loop<Kind>(pipeline, config.workload, result.samples_ns);
  });
  result.counters = pipeline.shutdown();

  detail::write_samples_csv(run_file(dir, run, ".csv"), config.config_id, run, result.samples_ns);
  nlohmann::json meta{
      {"config", to_json(config)},
      {"suite_index", suite_index},
      {"run", run},
      {"pid", result.pid},
      {"counters", detail::counters_json(result.counters)},
      {"clock_resolution_ns", result.clock_resolution_ns},
      {"checksum", result.checksum},
  };
  std::ofstream(run_file(dir, run, ".json")) << meta.dump(2) << '\n';
  return result;
}

/// Reads a raw samples CSV; every malformed row is reported as file:line.
inline std::vector<std::int64_t> read_samples_csv(const fs::path& path, const std::string& expected_config,
                                                  int expected_run) {
  std::ifstream in(path);
  if (!in) throw ResultFormatError(path.string() + ": cannot open");
  const std::string file = path.string();
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "config_id,run,iteration,duration_ns") {
    throw ResultFormatError(file + ":1: bad header");
  }
  std::vector<std::int64_t> samples;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    std::string_view fields[4];
    std::size_t count = 0;
    while (count < 4) {
      const auto pos = rest.find(',');
      fields[count++] = rest.substr(0, pos);
      if (pos == std::string_view::npos) {
        rest = {};
        break;
      }
      rest.remove_prefix(pos + 1);
    }
    if (count != 4 || !rest.empty()) throw ResultFormatError(file + ":" + std::to_string(line_no) + ": expected 4 fields");
    if (fields[0] != expected_config) {
      throw ResultFormatError(file + ":" + std::to_string(line_no) + ": config_id '" + std::string(fields[0]) +
                              "' does not match '" + expected_config + "'");
    }
    if (detail::parse_field(file, line_no, fields[1]) != expected_run) {
      throw ResultFormatError(file + ":" + std::to_string(line_no) + ": unexpected run index");
    }
    if (detail::parse_field(file, line_no, fields[2]) != static_cast<std::int64_t>(samples.size())) {
      throw ResultFormatError(file + ":" + std::to_string(line_no) + ": iteration index out of sequence");
    }
    samples.push_back(detail::parse_field(file, line_no, fields[3]));
  }
  return samples;
}

inline nlohmann::json read_metadata(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ResultFormatError(path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ResultFormatError(path.string() + ": " + e.what());
  }
}

/**
 * Runs every repetition of `config` in its own child process, sequentially.
 * A crashed or failing child marks its run failed; whatever it persisted is kept.
 */
inline SampleSet run_config(const BenchmarkConfig& config, const fs::path& root, RunnerOptions options = {}) {
  config.validate();
  const fs::path dir = result_dir(root, config.config_id, config.workload.depth);
  fs::create_directories(dir);

  SampleSet set;
  set.config_id = config.config_id;
  set.depth = config.workload.depth;
  set.suite_index = options.suite_index;
  set.warmup_fraction = config.warmup_fraction;
  set.config = config;

  for (int run = 0; run < config.runs; ++run) {
    if (!options.fork_per_run) {
      set.runs.push_back(execute_run(config, run, dir, options.suite_index));
      continue;
    }
    std::fflush(nullptr);
    const pid_t child = ::fork();
    if (child < 0) throw std::runtime_error("fork failed");
    if (child == 0) {
      int code = 0;
      try {
        execute_run(config, run, dir, options.suite_index);
      } catch (const std::exception& e) {
        std::fprintf(stderr, "run %d of %s failed: %s\n", run, config.config_id.c_str(), e.what());
        code = 3;
      }
      std::fflush(nullptr);
      ::_exit(code);
    }
    int status = 0;
    ::waitpid(child, &status, 0);

    RunResult r;
    r.run = run;
    r.pid = static_cast<long>(child);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      r.failed = true;
      r.failure = WIFSIGNALED(status) ? "child killed by signal " + std::to_string(WTERMSIG(status))
                                      : "child exited with status " + std::to_string(WEXITSTATUS(status));
    }
    try {
      r.samples_ns = read_samples_csv(run_file(dir, run, ".csv"), config.config_id, run);
      const auto meta = read_metadata(run_file(dir, run, ".json"));
      r.pid = meta.at("pid").get<long>();
      const auto& c = meta.at("counters");
      r.counters = PipelineReport{c.at("enqueued"), c.at("written"), c.at("overwritten"), c.at("dropped"),
                                  c.at("rejected")};
      r.checksum = meta.at("checksum").get<std::int64_t>();
      r.clock_resolution_ns = meta.at("clock_resolution_ns").get<std::int64_t>();
    } catch (const std::exception& e) {
      if (!r.failed) {
        r.failed = true;
        r.failure = e.what();
      }
    }
    set.runs.push_back(std::move(r));
  }
  return set;
}

/// Runs `base` once per depth; results are keyed by (config_id, depth) on disk.
inline std::vector<SampleSet> sweep_depths(const BenchmarkConfig& base, std::span<const std::int64_t> depths,
                                           const fs::path& root, RunnerOptions options = {}) {
  if (depths.empty()) throw std::invalid_argument("sweep needs at least one depth");
  for (const auto d : depths) {
    if (d < 1) throw std::invalid_argument("sweep depths must be >= 1");
  }
  std::vector<SampleSet> out;
  for (const auto d : depths) {
    BenchmarkConfig c = base;
    c.workload.depth = d;
    out.push_back(run_config(c, root, options));
  }
  return out;
}

/// Loads every (config_id, depth) result set under `root`, ordered by suite position then depth.
inline std::vector<SampleSet> load_results(const fs::path& root) {
  if (!fs::is_directory(root)) throw ResultFormatError(root.string() + ": not a directory");
  std::vector<SampleSet> sets;
  std::vector<fs::path> config_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) config_dirs.push_back(e.path());
  }
  std::sort(config_dirs.begin(), config_dirs.end());
  for (const auto& cdir : config_dirs) {
    std::vector<fs::path> depth_dirs;
    for (const auto& e : fs::directory_iterator(cdir)) {
      const auto name = e.path().filename().string();
      if (e.is_directory() && name.size() > 1 && name[0] == 'd') depth_dirs.push_back(e.path());
    }
    std::sort(depth_dirs.begin(), depth_dirs.end());
    for (const auto& ddir : depth_dirs) {
      std::map<int, fs::path> metas;
      for (const auto& e : fs::directory_iterator(ddir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("run-", 0) == 0 && e.path().extension() == ".json") {
          int run = -1;
          const auto stem = e.path().stem().string().substr(4);
          const auto res = std::from_chars(stem.data(), stem.data() + stem.size(), run);
          if (res.ec != std::errc{} || res.ptr != stem.data() + stem.size()) {
            throw ResultFormatError(e.path().string() + ": unexpected file name");
          }
          metas.emplace(run, e.path());
        }
      }
      if (metas.empty()) continue;
      SampleSet set;
      for (const auto& [run, meta_path] : metas) {
        const auto meta = read_metadata(meta_path);
        BenchmarkConfig config;
        try {
          config = benchmark_config_from_json(meta.at("config"), meta_path.string() + "#config");
          set.suite_index = meta.value("suite_index", 0);
        } catch (const nlohmann::json::exception& e) {
          throw ResultFormatError(meta_path.string() + ": " + e.what());
        } catch (const ConfigError& e) {
          throw ResultFormatError(e.what());
        }
        if (set.runs.empty()) {
          set.config = config;
          set.config_id = config.config_id;
          set.depth = config.workload.depth;
          set.warmup_fraction = config.warmup_fraction;
        } else if (config.config_id != set.config_id || config.workload.depth != set.depth) {
          throw ResultFormatError(meta_path.string() + ": run metadata disagrees with sibling runs");
        }
        RunResult r;
        r.run = run;
        try {
          r.pid = meta.at("pid").get<long>();
          const auto& c = meta.at("counters");
          r.counters = PipelineReport{c.at("enqueued"), c.at("written"), c.at("overwritten"), c.at("dropped"),
                                      c.value("rejected", std::uint64_t{0})};
          r.checksum = meta.at("checksum").get<std::int64_t>();
          r.clock_resolution_ns = meta.value("clock_resolution_ns", std::int64_t{0});
        } catch (const nlohmann::json::exception& e) {
          throw ResultFormatError(meta_path.string() + ": " + e.what());
        }
        r.samples_ns = read_samples_csv(run_file(ddir, run, ".csv"), set.config_id, run);
        if (static_cast<std::int64_t>(r.samples_ns.size()) != config.iterations) {
          throw ResultFormatError(run_file(ddir, run, ".csv").string() + ": expected " +
                                  std::to_string(config.iterations) + " rows, found " +
                                  std::to_string(r.samples_ns.size()));
        }
        set.runs.push_back(std::move(r));
      }
      sets.push_back(std::move(set));
    }
  }
  std::stable_sort(sets.begin(), sets.end(), [](const SampleSet& a, const SampleSet& b) {
    if (a.suite_index != b.suite_index) return a.suite_index < b.suite_index;
    if (a.config_id != b.config_id) return a.config_id < b.config_id;
    return a.depth < b.depth;
  });
  return sets;
}

/// Post-warmup samples of all runs, concatenated in run order.
inline std::vector<std::int64_t> pooled_samples(const SampleSet& set) {
  std::vector<std::int64_t> out;
  for (const auto& r : set.runs) {
    const auto kept = discard_warmup(r.samples_ns, set.warmup_fraction);
    out.insert(out.end(), kept.begin(), kept.end());
  }
  return out;
}

}  // namespace minimon
