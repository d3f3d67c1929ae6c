#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <fmt/format.h>

#include "manet/types.hpp"

namespace manet {

/// Opaque handle returned by Scheduler::schedule; used for cancellation.
class EventHandle {
 public:
  constexpr EventHandle() = default;
  constexpr bool valid() const { return seq_ != 0; }
  constexpr auto operator<=>(const EventHandle&) const = default;

 private:
  friend class Scheduler;
  constexpr explicit EventHandle(std::uint64_t seq) : seq_(seq) {}
  std::uint64_t seq_ = 0;
};

/// Discrete-event kernel. Events fire in (time, insertion sequence) order.
///
/// Scheduling before the current clock throws std::logic_error: a caller
/// doing so has a bug and the run must not continue with reordered causality.
class Scheduler {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  EventHandle schedule(SimTime at, Action action);
  EventHandle schedule_in(SimTime delay, Action action) { return schedule(now_ + delay, std::move(action)); }

  /// Returns true if the event was still pending.
  bool cancel(EventHandle handle);
  bool pending(EventHandle handle) const;

  /// Executes every event with fire time <= t_end, then sets the clock to t_end.
  SimTime run_until(SimTime t_end);

  /// Events still queued (end-of-run residue after run_until).
  std::size_t residue() const { return actions_.size(); }
  std::uint64_t fired() const { return fired_; }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    bool operator>(const Entry& o) const { return at != o.at ? at > o.at : seq > o.seq; }
  };

  SimTime now_{};
  std::uint64_t next_seq_ = 1;
  std::uint64_t fired_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  std::unordered_map<std::uint64_t, Action> actions_;
};

/// Optional per-run trace: one `time<TAB>node<TAB>kind<TAB>detail` line per event.
class EventLog {
 public:
  using Sink = std::function<void(std::string_view line)>;

  EventLog() = default;
  explicit EventLog(Sink sink) : sink_(std::move(sink)) {}

  bool enabled() const { return static_cast<bool>(sink_); }
  void set_sink(Sink sink) { sink_ = std::move(sink); }

  template <typename... Args>
  void write(SimTime t, NodeId node, std::string_view kind, fmt::format_string<Args...> detail, Args&&... args) {
    if (!sink_) return;
    line_.clear();
    fmt::format_to(std::back_inserter(line_), "{}\t{}\t{}\t", t.str(), node, kind);
    fmt::format_to(std::back_inserter(line_), detail, std::forward<Args>(args)...);
    sink_(std::string_view(line_.data(), line_.size()));
  }

 private:
  Sink sink_;
  fmt::memory_buffer line_;
};

/// Collects log lines in memory; handy for tests and digesting.
struct LogCollector {
  std::vector<std::string> lines;
  EventLog::Sink sink() {
    return [this](std::string_view l) { lines.emplace_back(l); };
  }
};

/// Seeded random stream. The generator seed is a hash of
/// (master seed, label, index), so adding a new consumer never shifts the
/// sequence seen by another one.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string_view label, std::uint64_t index = 0);

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform in (0, 1].
  double uniform_open_closed() { return 1.0 - uniform(); }
  /// Uniform integer in [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label, std::uint64_t index);

}  // namespace manet
