#pragma once

/**
 * @file queues.hpp
 * Bounded FIFO queues between probes and the writer thread.
 *
 * BlockingLinkedQueue allocates one node per element and blocks producers
 * while full. SyncRingQueue is a fixed slot array with start/end indices;
 * a put into a full ring overwrites the oldest element. Both serialize
 * every operation on one mutex and support any number of producers and a
 * single consumer.
 *
 * close() ends the producer side: later puts return false, pending elements
 * stay takeable, and blocked producers/consumers wake up.
 *
 * A consumer parked in poll() on an empty queue is only signalled once
 * wake_threshold() elements are queued (half the capacity); below that it
 * wakes on its timeout. Producers therefore skip the wakeup syscall on most
 * puts.
 */

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "minimon/kinds.hpp"

namespace minimon {

inline constexpr std::size_t kDefaultQueueCapacity = 10'000;

struct QueueStats {
  std::uint64_t enqueued = 0;
  std::uint64_t dequeued = 0;
  std::uint64_t overwritten = 0;
  std::uint64_t capacity = 0;
  std::uint64_t in_queue = 0;

  bool operator==(const QueueStats&) const = default;
};

template <class T>
class RecordQueue {
 public:
  virtual ~RecordQueue() = default;

  /// Returns false only when the queue has been closed.
  virtual bool put(T value) = 0;
  /// Non-blocking; empty when nothing is queued.
  virtual std::optional<T> take() = 0;
  /// On an empty queue waits until wake_threshold() elements arrive, the queue closes, or `timeout` passes.
  virtual std::optional<T> poll(std::chrono::nanoseconds timeout) = 0;
  /// poll() that moves up to `max` oldest elements into `out` under one lock; same order as repeated take().
  virtual std::size_t poll_batch(std::vector<T>& out, std::size_t max, std::chrono::nanoseconds timeout) = 0;
  virtual void close() = 0;
  virtual bool closed() const = 0;
  virtual QueueStats stats() const = 0;
  virtual QueueKind kind() const = 0;

  static std::size_t wake_threshold_for(std::size_t capacity) { return capacity < 2 ? 1 : capacity / 2; }
};

template <class T>
class BlockingLinkedQueue final : public RecordQueue<T> {
 public:
  explicit BlockingLinkedQueue(std::size_t capacity = kDefaultQueueCapacity)
      : capacity_(capacity), wake_threshold_(RecordQueue<T>::wake_threshold_for(capacity)) {
    if (capacity == 0) throw std::invalid_argument("queue capacity must be >= 1");
  }

  bool put(T value) override {
    std::unique_lock lock(mutex_);
    while (items_.size() >= capacity_ && !closed_) {
      ++waiting_producers_;
      not_full_.wait(lock);
      --waiting_producers_;
    }
    if (closed_) return false;
    items_.push_back(std::move(value));
    ++enqueued_;
    if (waiting_consumers_ > 0 && items_.size() >= wake_threshold_) not_empty_.notify_one();
    return true;
  }

  std::optional<T> take() override {
    std::lock_guard lock(mutex_);
    return pop_locked();
  }

  std::optional<T> poll(std::chrono::nanoseconds timeout) override {
    std::unique_lock lock(mutex_);
    if (items_.empty() && !closed_) {
      ++waiting_consumers_;
      not_empty_.wait_for(lock, timeout, [this] { return items_.size() >= wake_threshold_ || closed_; });
      --waiting_consumers_;
    }
    return pop_locked();
  }

  std::size_t poll_batch(std::vector<T>& out, std::size_t max, std::chrono::nanoseconds timeout) override {
    std::unique_lock lock(mutex_);
    if (items_.empty() && !closed_) {
      ++waiting_consumers_;
      not_empty_.wait_for(lock, timeout, [this] { return items_.size() >= wake_threshold_ || closed_; });
      --waiting_consumers_;
    }
    std::size_t moved = 0;
    while (moved < max && !items_.empty()) {
      out.push_back(std::move(items_.front()));
      items_.pop_front();
      ++moved;
    }
    dequeued_ += moved;
    if (moved > 0 && waiting_producers_ > 0) not_full_.notify_all();
    return moved;
  }

  void close() override {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    not_full_.notify_all();
    not_empty_.notify_all();
  }

  bool closed() const override {
    std::lock_guard lock(mutex_);
    return closed_;
  }

  QueueStats stats() const override {
    std::lock_guard lock(mutex_);
    return QueueStats{enqueued_, dequeued_, 0, capacity_, items_.size()};
  }

  QueueKind kind() const override { return QueueKind::BlockingLinked; }

 private:
  std::optional<T> pop_locked() {
    if (items_.empty()) return std::nullopt;
    std::optional<T> out(std::move(items_.front()));
    items_.pop_front();
    ++dequeued_;
    if (waiting_producers_ > 0) not_full_.notify_one();
    return out;
  }

  const std::size_t capacity_;
  const std::size_t wake_threshold_;
  mutable std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::list<T> items_;
  std::uint64_t enqueued_ = 0;
  std::uint64_t dequeued_ = 0;
  int waiting_producers_ = 0;
  int waiting_consumers_ = 0;
  bool closed_ = false;
};

template <class T>
class SyncRingQueue final : public RecordQueue<T> {
 public:
  explicit SyncRingQueue(std::size_t capacity = kDefaultQueueCapacity)
      : slots_(capacity), wake_threshold_(RecordQueue<T>::wake_threshold_for(capacity)) {
    if (capacity == 0) throw std::invalid_argument("queue capacity must be >= 1");
  }

  bool put(T value) override {
    std::lock_guard lock(mutex_);
    if (closed_) return false;
    slots_[end_] = std::move(value);
    end_ = advance(end_);
    if (full_) {
      // end caught up with start: the oldest element was just replaced
      start_ = end_;
      ++overwritten_;
    } else if (end_ == start_) {
      full_ = true;
    }
    ++enqueued_;
    if (waiting_consumers_ > 0 && size_locked() >= wake_threshold_) not_empty_.notify_one();
    return true;
  }

  std::optional<T> take() override {
    std::lock_guard lock(mutex_);
    return pop_locked();
  }

  std::optional<T> poll(std::chrono::nanoseconds timeout) override {
    std::unique_lock lock(mutex_);
    if (empty_locked() && !closed_) {
      ++waiting_consumers_;
      not_empty_.wait_for(lock, timeout, [this] { return size_locked() >= wake_threshold_ || closed_; });
      --waiting_consumers_;
    }
    return pop_locked();
  }

  std::size_t poll_batch(std::vector<T>& out, std::size_t max, std::chrono::nanoseconds timeout) override {
    std::unique_lock lock(mutex_);
    if (empty_locked() && !closed_) {
      ++waiting_consumers_;
      not_empty_.wait_for(lock, timeout, [this] { return size_locked() >= wake_threshold_ || closed_; });
      --waiting_consumers_;
    }
    std::size_t moved = 0;
    while (moved < max) {
      auto item = pop_locked();
      if (!item) break;
      out.push_back(std::move(*item));
      ++moved;
    }
    return moved;
  }

  void close() override {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    not_empty_.notify_all();
  }

  bool closed() const override {
    std::lock_guard lock(mutex_);
    return closed_;
  }

  QueueStats stats() const override {
    std::lock_guard lock(mutex_);
    return QueueStats{enqueued_, dequeued_, overwritten_, slots_.size(), size_locked()};
  }

  QueueKind kind() const override { return QueueKind::SyncRing; }

 private:
  std::size_t advance(std::size_t i) const { return i + 1 == slots_.size() ? 0 : i + 1; }
  bool empty_locked() const { return start_ == end_ && !full_; }
  std::size_t size_locked() const {
    if (full_) return slots_.size();
    return end_ >= start_ ? end_ - start_ : slots_.size() - start_ + end_;
  }

  std::optional<T> pop_locked() {
    if (empty_locked()) return std::nullopt;
    std::optional<T> out(std::move(slots_[start_]));
    slots_[start_].reset();
    start_ = advance(start_);
    full_ = false;
    ++dequeued_;
    return out;
  }

  mutable std::mutex mutex_;
  std::condition_variable not_empty_;
  std::vector<std::optional<T>> slots_;
  const std::size_t wake_threshold_;
  std::size_t start_ = 0;
  std::size_t end_ = 0;
  bool full_ = false;
  std::uint64_t enqueued_ = 0;
  std::uint64_t dequeued_ = 0;
  std::uint64_t overwritten_ = 0;
  int waiting_consumers_ = 0;
  bool closed_ = false;
};

template <class T>
std::unique_ptr<RecordQueue<T>> make_queue(QueueKind kind, std::size_t capacity) {
  switch (kind) {
    case QueueKind::BlockingLinked:
      return std::make_unique<BlockingLinkedQueue<T>>(capacity);
    case QueueKind::SyncRing:
      return std::make_unique<SyncRingQueue<T>>(capacity);
  }
  throw std::invalid_argument("unknown queue kind");
}

}  // namespace minimon
