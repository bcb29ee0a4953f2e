#pragma once

/**
 * @file benchmark_config.hpp
 * Benchmark configurations and the JSON suite file.
 *
 * Suite file layout (keys mirror the struct fields):
 *
 *     {
 *       "output_dir": "results",
 *       "depths": [2, 4, 8],
 *       "configs": [
 *         { "config_id": "direct-full",
 *           "pipeline": { "probe": "direct-full", "queue": "blocking-linked",
 *                         "queue_capacity": 10000, "writer": "file",
 *                         "aggregation_window": 1000 },
 *           "workload": { "depth": 10, "busy_ns": 0 },
 *           "iterations": 100000, "runs": 5, "warmup_fraction": 0.5 } ]
 *     }
 *
 * Everything except config_id and pipeline.probe has a default.
 */

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "minimon/kinds.hpp"
#include "minimon/pipeline.hpp"
#include "minimon/workload.hpp"

namespace minimon {

inline constexpr std::int64_t kDeskIterations = 100'000;
inline constexpr int kDeskRuns = 5;
inline constexpr std::int64_t kPaperIterations = 2'000'000;
inline constexpr int kPaperRuns = 10;
inline constexpr double kDefaultWarmupFraction = 0.5;

struct BenchmarkConfig {
  std::string config_id;
  PipelineConfig pipeline;
  WorkloadParams workload;
  std::int64_t iterations = kDeskIterations;
  int runs = kDeskRuns;
  double warmup_fraction = kDefaultWarmupFraction;

  void validate() const {
    if (config_id.empty()) throw std::invalid_argument("config_id must not be empty");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
      throw std::invalid_argument("warmup_fraction must be in [0, 1)");
    }
    workload.validate();
    if (pipeline.queue_capacity < 1) throw std::invalid_argument("queue_capacity must be >= 1");
    if (pipeline.aggregation_window < 1) throw std::invalid_argument("aggregation_window must be >= 1");
  }
};

struct SuiteConfig {
  std::vector<BenchmarkConfig> configs;
  std::vector<std::int64_t> depths;
  std::string output_dir;
};

/// Config error carrying the JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline nlohmann::json to_json(const BenchmarkConfig& c) {
  return nlohmann::json{
      {"config_id", c.config_id},
      {"pipeline",
       {{"probe", to_string(c.pipeline.probe)},
        {"queue", to_string(c.pipeline.queue)},
        {"queue_capacity", c.pipeline.queue_capacity},
        {"writer", to_string(c.pipeline.writer)},
        {"aggregation_window", c.pipeline.aggregation_window}}},
      {"workload", {{"depth", c.workload.depth}, {"busy_ns", c.workload.busy_ns}}},
      {"iterations", c.iterations},
      {"runs", c.runs},
      {"warmup_fraction", c.warmup_fraction},
  };
}

namespace detail {

inline const nlohmann::json* member(const nlohmann::json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline std::string join_path(const std::string& path, const char* key) { return path + "." + key; }

inline std::int64_t read_int(const nlohmann::json& obj, const std::string& path, const char* key,
                             std::optional<std::int64_t> fallback, std::int64_t min_value) {
  const auto* v = member(obj, path, key);
  const std::string p = join_path(path, key);
  if (v == nullptr) {
    if (!fallback) throw ConfigError(p, "missing required field");
    return *fallback;
  }
  if (!v->is_number_integer()) throw ConfigError(p, "expected an integer");
  const auto value = v->get<std::int64_t>();
  if (value < min_value) throw ConfigError(p, "must be >= " + std::to_string(min_value));
  return value;
}

inline std::string read_string(const nlohmann::json& obj, const std::string& path, const char* key,
                               std::optional<std::string> fallback) {
  const auto* v = member(obj, path, key);
  const std::string p = join_path(path, key);
  if (v == nullptr) {
    if (!fallback) throw ConfigError(p, "missing required field");
    return *fallback;
  }
  if (!v->is_string()) throw ConfigError(p, "expected a string");
  return v->get<std::string>();
}

template <class E, class Parse>
E read_enum(const nlohmann::json& obj, const std::string& path, const char* key, std::optional<E> fallback,
            Parse parse, const char* what) {
  const auto* v = member(obj, path, key);
  const std::string p = join_path(path, key);
  if (v == nullptr) {
    if (!fallback) throw ConfigError(p, "missing required field");
    return *fallback;
  }
  if (!v->is_string()) throw ConfigError(p, "expected a string");
  const auto name = v->get<std::string>();
  const auto parsed = parse(name);
  if (!parsed) throw ConfigError(p, std::string("unknown ") + what + " '" + name + "'");
  return *parsed;
}

}  // namespace detail

inline BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace detail;
  BenchmarkConfig c;
  c.config_id = read_string(j, path, "config_id", std::nullopt);
  if (c.config_id.empty()) throw ConfigError(join_path(path, "config_id"), "must not be empty");
  if (c.config_id.find_first_of("/\\;, \t\n") != std::string::npos || c.config_id == "." || c.config_id == "..") {
    throw ConfigError(join_path(path, "config_id"), "must be a plain name (no separators or whitespace)");
  }

  const auto* p = member(j, path, "pipeline");
  const std::string pp = join_path(path, "pipeline");
  if (p == nullptr) throw ConfigError(pp, "missing required field");
  c.pipeline.probe = read_enum<ProbeKind>(*p, pp, "probe", std::nullopt, parse_probe_kind, "probe");
  c.pipeline.queue =
      read_enum<QueueKind>(*p, pp, "queue", QueueKind::BlockingLinked, parse_queue_kind, "queue");
  c.pipeline.writer = read_enum<WriterKind>(*p, pp, "writer", WriterKind::File, parse_writer_kind, "writer");
  c.pipeline.queue_capacity = static_cast<std::size_t>(
      read_int(*p, pp, "queue_capacity", static_cast<std::int64_t>(kDefaultQueueCapacity), 1));
  c.pipeline.aggregation_window = read_int(*p, pp, "aggregation_window", kDefaultAggregationWindow, 1);

  if (const auto* w = member(j, path, "workload")) {
    const std::string wp = join_path(path, "workload");
    c.workload.depth = read_int(*w, wp, "depth", 10, 1);
    c.workload.busy_ns = read_int(*w, wp, "busy_ns", 0, 0);
  }
  c.iterations = read_int(j, path, "iterations", kDeskIterations, 1);
  c.runs = static_cast<int>(read_int(j, path, "runs", kDeskRuns, 1));
  if (const auto* f = member(j, path, "warmup_fraction")) {
    const std::string fp = join_path(path, "warmup_fraction");
    if (!f->is_number()) throw ConfigError(fp, "expected a number");
    c.warmup_fraction = f->get<double>();
    if (!(c.warmup_fraction >= 0.0 && c.warmup_fraction < 1.0)) throw ConfigError(fp, "must be in [0, 1)");
  }
  return c;
}

inline SuiteConfig parse_suite(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("$", "expected an object");
  SuiteConfig suite;
  const auto it = j.find("configs");
  if (it == j.end()) throw ConfigError("$.configs", "missing required field");
  if (!it->is_array()) throw ConfigError("$.configs", "expected an array");
  if (it->empty()) throw ConfigError("$.configs", "must contain at least one configuration");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const std::string path = "$.configs[" + std::to_string(i) + "]";
    auto c = benchmark_config_from_json((*it)[i], path);
    if (!seen.insert(c.config_id).second) {
      throw ConfigError(path + ".config_id", "duplicate config_id '" + c.config_id + "'");
    }
    suite.configs.push_back(std::move(c));
  }
  if (const auto d = j.find("depths"); d != j.end()) {
    if (!d->is_array()) throw ConfigError("$.depths", "expected an array");
    for (std::size_t i = 0; i < d->size(); ++i) {
      const auto& v = (*d)[i];
      const std::string path = "$.depths[" + std::to_string(i) + "]";
      if (!v.is_number_integer() || v.get<std::int64_t>() < 1) throw ConfigError(path, "must be an integer >= 1");
      suite.depths.push_back(v.get<std::int64_t>());
    }
  }
  if (const auto o = j.find("output_dir"); o != j.end()) {
    if (!o->is_string()) throw ConfigError("$.output_dir", "expected a string");
    suite.output_dir = o->get<std::string>();
  }
  return suite;
}

inline SuiteConfig load_suite(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open suite file");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(file.string(), e.what());
  }
  return parse_suite(j);
}

}  // namespace minimon
