#include "manet/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "manet/engine.hpp"

namespace manet {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

WaypointTrace::WaypointTrace(std::vector<std::vector<Waypoint>> itineraries, double width, double height,
                             double duration)
    : itineraries_(std::move(itineraries)), width_(width), height_(height), duration_(duration) {
  if (!(width_ > 0.0) || !(height_ > 0.0)) throw std::invalid_argument("trace: zero-area space");
  if (itineraries_.empty()) throw std::invalid_argument("trace: no nodes");
  if (!(duration_ > 0.0)) throw std::invalid_argument("trace: duration must be positive");
  for (std::size_t n = 0; n < itineraries_.size(); ++n) {
    const auto& it = itineraries_[n];
    if (it.empty() || it.front().arrival_time != 0.0)
      throw std::invalid_argument(fmt::format("trace: node {} must start with a waypoint at t=0", n));
    for (std::size_t i = 0; i < it.size(); ++i) {
      const Waypoint& w = it[i];
      if (w.position.x < 0.0 || w.position.x > width_ || w.position.y < 0.0 || w.position.y > height_)
        throw std::invalid_argument(fmt::format("trace: node {} waypoint {} outside space", n, i));
      if (w.pause_until < w.arrival_time)
        throw std::invalid_argument(fmt::format("trace: node {} waypoint {} pause ends before arrival", n, i));
      if (!(w.leg_speed > 0.0)) throw std::invalid_argument(fmt::format("trace: node {} non-positive speed", n));
      if (i > 0 && !(w.arrival_time > it[i - 1].arrival_time))
        throw std::invalid_argument(fmt::format("trace: node {} arrivals not increasing", n));
    }
    if (it.back().pause_until < duration_)
      throw std::invalid_argument(fmt::format("trace: node {} itinerary ends before the run", n));
  }
}

WaypointTrace WaypointTrace::stationary(const std::vector<Vec2>& positions, double duration) {
  double w = 1.0;
  double h = 1.0;
  std::vector<std::vector<Waypoint>> its;
  its.reserve(positions.size());
  for (Vec2 p : positions) {
    w = std::max(w, p.x);
    h = std::max(h, p.y);
    its.push_back({Waypoint{p, 0.0, duration, 1.0}});
  }
  return WaypointTrace(std::move(its), w, h, duration);
}

Vec2 WaypointTrace::position_at(NodeId node, double t) const {
  if (t < 0.0 || t > duration_)
    throw std::out_of_range(fmt::format("position_at: t={} outside [0, {}]", t, duration_));
  const auto& it = itineraries_.at(node);
  // Last waypoint with arrival_time <= t.
  auto next = std::upper_bound(it.begin(), it.end(), t,
                               [](double v, const Waypoint& w) { return v < w.arrival_time; });
  const Waypoint& cur = *(next - 1);
  if (t <= cur.pause_until || next == it.end()) return cur.position;
  const double leg = next->arrival_time - cur.pause_until;
  const double frac = (t - cur.pause_until) / leg;
  return Vec2{cur.position.x + (next->position.x - cur.position.x) * frac,
              cur.position.y + (next->position.y - cur.position.y) * frac};
}

bool WaypointTrace::in_range(NodeId a, NodeId b, double t, double radio_range) const {
  return distance(position_at(a, t), position_at(b, t)) <= radio_range;
}

std::vector<Vec2> WaypointTrace::snapshot(double t) const {
  std::vector<Vec2> out;
  out.reserve(itineraries_.size());
  for (NodeId n = 0; n < itineraries_.size(); ++n) out.push_back(position_at(n, t));
  return out;
}

void WaypointTrace::write_tsv(std::ostream& out) const {
  for (NodeId n = 0; n < itineraries_.size(); ++n)
    for (const Waypoint& w : itineraries_[n])
      fmt::print(out, "{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\n", n, w.arrival_time, w.position.x, w.position.y,
                 w.pause_until, w.leg_speed);
}

WaypointTrace generate_trace(const MobilityParams& p, std::uint64_t seed) {
  if (!(p.width > 0.0) || !(p.height > 0.0)) throw std::invalid_argument("mobility: zero-area space");
  if (p.n_nodes == 0) throw std::invalid_argument("mobility: zero nodes");
  if (!(p.max_speed > 0.0)) throw std::invalid_argument("mobility: max_speed must be positive");
  if (p.pause_time < 0.0) throw std::invalid_argument("mobility: negative pause_time");
  if (!(p.duration > 0.0)) throw std::invalid_argument("mobility: duration must be positive");

  const double lo = std::min(p.min_speed, p.max_speed);
  std::vector<std::vector<Waypoint>> its(p.n_nodes);
  for (NodeId n = 0; n < p.n_nodes; ++n) {
    RngStream rng(seed, "mobility", n);
    auto draw_point = [&] { return Vec2{rng.uniform(0.0, p.width), rng.uniform(0.0, p.height)}; };
    auto draw_speed = [&] { return lo + (p.max_speed - lo) * rng.uniform_open_closed(); };

    auto& it = its[n];
    it.push_back(Waypoint{draw_point(), 0.0, p.pause_time, draw_speed()});
    while (it.back().pause_until < p.duration) {
      const Waypoint& from = it.back();
      Vec2 dest = draw_point();
      double d = distance(from.position, dest);
      while (d == 0.0) {
        dest = draw_point();
        d = distance(from.position, dest);
      }
      const double arrival = from.pause_until + d / from.leg_speed;
      it.push_back(Waypoint{dest, arrival, arrival + p.pause_time, draw_speed()});
    }
  }
  return WaypointTrace(std::move(its), p.width, p.height, p.duration);
}

}  // namespace manet
