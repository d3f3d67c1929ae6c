#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace manet {

using NodeId = std::uint32_t;
inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();

/// Ordered list of nodes a packet traverses (or a cached path from its owner).
using Route = std::vector<NodeId>;

/// Simulated time as an integer count of nanoseconds.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_ns(std::int64_t ns) { return SimTime{ns}; }
  static constexpr SimTime from_us(std::int64_t us) { return SimTime{us * 1'000}; }
  static constexpr SimTime from_ms(std::int64_t ms) { return SimTime{ms * 1'000'000}; }
  static SimTime from_seconds(double s);

  constexpr std::int64_t ns() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) / 1e9; }

  /// Fixed nine-decimal rendering, e.g. "12.000500000".
  std::string str() const;

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime{ns_ + o.ns_}; }
  constexpr SimTime operator-(SimTime o) const { return SimTime{ns_ - o.ns_}; }
  constexpr SimTime operator*(std::int64_t k) const { return SimTime{ns_ * k}; }
  constexpr SimTime& operator+=(SimTime o) {
    ns_ += o.ns_;
    return *this;
  }

 private:
  constexpr explicit SimTime(std::int64_t ns) : ns_(ns) {}
  std::int64_t ns_ = 0;
};

/// Identifies one route discovery: the requesting source and its per-source counter.
struct RreqKey {
  NodeId source = 0;
  std::uint32_t id = 0;
  constexpr auto operator<=>(const RreqKey&) const = default;
};

bool is_loop_free(const Route& route);

std::string format_route(const Route& route);

}  // namespace manet
