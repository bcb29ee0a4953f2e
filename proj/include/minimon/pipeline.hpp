#pragma once

/**
 * @file pipeline.hpp
 * Monitoring controller: probes hand records to a queue, one writer thread
 * drains the queue into a sink.
 *
 * The producer side never touches the output file; the writer thread owns it
 * exclusively. Shutdown closes the producer side, drains everything left in
 * the queue, flushes and joins the writer.
 */

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "minimon/kinds.hpp"
#include "minimon/queues.hpp"
#include "minimon/record.hpp"

namespace minimon {

inline constexpr std::int64_t kDefaultAggregationWindow = 1000;
inline constexpr const char* kBenchHostname = "bench-host";
inline constexpr const char* kBenchSessionId = "s0";

struct PipelineConfig {
  ProbeKind probe = ProbeKind::None;
  QueueKind queue = QueueKind::BlockingLinked;
  std::size_t queue_capacity = kDefaultQueueCapacity;
  WriterKind writer = WriterKind::File;
  std::int64_t aggregation_window = kDefaultAggregationWindow;
  std::filesystem::path output_path;

  void validate() const {
    if (queue_capacity < 1) throw std::invalid_argument("queue_capacity must be >= 1");
    if (aggregation_window < 1) throw std::invalid_argument("aggregation_window must be >= 1");
    if (writer == WriterKind::File && output_path.empty()) {
      throw std::invalid_argument("file writer needs an output_path");
    }
  }
};

struct PipelineReport {
  std::uint64_t enqueued = 0;
  std::uint64_t written = 0;
  std::uint64_t overwritten = 0;
  std::uint64_t dropped = 0;
  std::uint64_t rejected = 0;  ///< records the writer could not serialize

  bool operator==(const PipelineReport&) const = default;
};

class Pipeline {
 public:
  static constexpr std::size_t kFlushEveryLines = 8192;
  static constexpr std::chrono::milliseconds kWriterPollTimeout{1};
  static constexpr std::size_t kWriterBatch = 512;

  explicit Pipeline(PipelineConfig config)
      : config_(std::move(config)),
        queue_((config_.validate(), make_queue<MonitoringRecord>(config_.queue, config_.queue_capacity))) {}

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  ~Pipeline() {
    try {
      shutdown();
    } catch (...) {
    }
  }

  /// Opens the sink and launches the writer thread.
  void start() {
    std::lock_guard lock(lifecycle_mutex_);
    if (state_.load() != State::Created) throw std::logic_error("pipeline already started");
    if (config_.writer == WriterKind::File) {
      file_ = std::fopen(config_.output_path.c_str(), "w");
      if (file_ == nullptr) {
        throw std::runtime_error("cannot open monitoring log '" + config_.output_path.string() + "'");
      }
      std::setvbuf(file_, nullptr, _IOFBF, 1 << 20);
    }
    writer_ = std::thread([this] { writer_loop(); });
    state_.store(State::Running, std::memory_order_release);
  }

  bool running() const noexcept { return state_.load(std::memory_order_acquire) == State::Running; }

  /// Enqueues a record. Never performs I/O on the calling thread.
  void new_monitoring_record(MonitoringRecord record) {
    const State s = state_.load(std::memory_order_acquire);
    if (s == State::Created) throw std::logic_error("pipeline not started");
    if (s == State::Stopped || !queue_->put(std::move(record))) {
      dropped_.fetch_add(1, std::memory_order_relaxed);
    }
  }

  /// Idempotent. Drains the queue completely before the writer exits.
  PipelineReport shutdown() {
    std::lock_guard lock(lifecycle_mutex_);
    if (state_.load() == State::Running) {
      state_.store(State::Stopped, std::memory_order_release);
      queue_->close();
      writer_.join();
      if (file_ != nullptr) {
        std::fclose(file_);
        file_ = nullptr;
      }
    } else if (state_.load() == State::Created) {
      state_.store(State::Stopped);
    }
    return report();
  }

  PipelineReport report() const {
    const QueueStats q = queue_->stats();
    return PipelineReport{q.enqueued, written_.load(), q.overwritten, dropped_.load(), rejected_.load()};
  }

  QueueStats queue_stats() const { return queue_->stats(); }
  const PipelineConfig& config() const noexcept { return config_; }
  const std::string& hostname() const noexcept { return hostname_; }
  const std::string& session_id() const noexcept { return session_id_; }

  /// Test hook: keeps the writer from taking further records until released.
  void hold_writer() {
    hold_requested_.store(true);
    gate_.lock();
  }
  void release_writer() {
    gate_.unlock();
    hold_requested_.store(false);
  }

 private:
  enum class State { Created, Running, Stopped };

  void writer_loop() {
    std::string buffer;
    std::vector<MonitoringRecord> batch;
    batch.reserve(kWriterBatch);
    std::size_t pending_lines = 0;
    while (true) {
      batch.clear();
      if (hold_requested_.load(std::memory_order_relaxed)) {
        std::this_thread::sleep_for(std::chrono::microseconds(100));
        continue;
      }
      {
        std::lock_guard gate(gate_);
        queue_->poll_batch(batch, kWriterBatch, kWriterPollTimeout);
      }
      if (batch.empty()) {
        if (queue_->closed() && queue_->stats().in_queue == 0) break;
        continue;
      }
      if (file_ == nullptr) {
        written_.fetch_add(batch.size(), std::memory_order_relaxed);
        continue;
      }
      std::uint64_t lines = 0;
      for (const auto& record : batch) {
        const std::size_t mark = buffer.size();
        try {
          serialize_to(record, buffer);
        } catch (const RecordFormatError&) {
          buffer.resize(mark);
          rejected_.fetch_add(1, std::memory_order_relaxed);
          continue;
        }
        buffer += '\n';
        ++lines;
      }
      written_.fetch_add(lines, std::memory_order_relaxed);
      pending_lines += lines;
      if (pending_lines >= kFlushEveryLines) {
        flush(buffer);
        pending_lines = 0;
      }
    }
    if (file_ != nullptr) flush(buffer);
  }

  void flush(std::string& buffer) {
    std::fwrite(buffer.data(), 1, buffer.size(), file_);
    std::fflush(file_);
    buffer.clear();
  }

  PipelineConfig config_;
  std::unique_ptr<RecordQueue<MonitoringRecord>> queue_;
  std::string hostname_ = kBenchHostname;
  std::string session_id_ = kBenchSessionId;
  std::atomic<State> state_{State::Created};
  std::mutex lifecycle_mutex_;
  std::mutex gate_;
  std::atomic<bool> hold_requested_{false};
  std::thread writer_;
  std::FILE* file_ = nullptr;
  std::atomic<std::uint64_t> written_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> rejected_{0};
};

}  // namespace minimon
