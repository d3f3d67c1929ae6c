#include "manet/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace manet {

SimTime SimTime::from_seconds(double s) { return SimTime{std::llround(s * 1e9)}; }

std::string SimTime::str() const {
  const std::int64_t whole = ns_ / 1'000'000'000;
  const std::int64_t frac = ns_ % 1'000'000'000;
  if (ns_ < 0) return fmt::format("-{}.{:09d}", -whole, -frac);
  return fmt::format("{}.{:09d}", whole, frac);
}

bool is_loop_free(const Route& route) {
  std::unordered_set<NodeId> seen;
  seen.reserve(route.size());
  for (NodeId n : route)
    if (!seen.insert(n).second) return false;
  return true;
}

std::string format_route(const Route& route) { return fmt::format("{}", fmt::join(route, "-")); }

EventHandle Scheduler::schedule(SimTime at, Action action) {
  if (at < now_)
    throw std::logic_error(fmt::format("event scheduled in the past: {} < {}", at.str(), now_.str()));
  const std::uint64_t seq = next_seq_++;
  queue_.push(Entry{at, seq});
  actions_.emplace(seq, std::move(action));
  return EventHandle{seq};
}

bool Scheduler::cancel(EventHandle handle) { return handle.valid() && actions_.erase(handle.seq_) > 0; }

bool Scheduler::pending(EventHandle handle) const { return handle.valid() && actions_.count(handle.seq_) > 0; }

SimTime Scheduler::run_until(SimTime t_end) {
  if (t_end < SimTime{}) throw std::invalid_argument("run_until: negative end time");
  while (!queue_.empty() && queue_.top().at <= t_end) {
    const Entry e = queue_.top();
    queue_.pop();
    auto it = actions_.find(e.seq);
    if (it == actions_.end()) continue;  // cancelled
    Action action = std::move(it->second);
    actions_.erase(it);
    now_ = e.at;
    ++fired_;
    action();
  }
  if (now_ < t_end) now_ = t_end;
  return now_;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a(label));
  return splitmix64(h ^ index);
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view label, std::uint64_t index)
    : gen_(derive_seed(master_seed, label, index)) {}

double RngStream::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::uniform_int(std::uint64_t lo, std::uint64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return gen_();
  // Rejection sampling keeps the draw unbiased and identical across platforms.
  const std::uint64_t n = span + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return lo + x % n;
}

}  // namespace manet
