#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "manet/types.hpp"

namespace manet {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

/// One stop of a node's itinerary. `leg_speed` is the speed of the leg that
/// departs this waypoint at `pause_until`.
struct Waypoint {
  Vec2 position;
  double arrival_time = 0.0;
  double pause_until = 0.0;
  double leg_speed = 1.0;
};

struct MobilityParams {
  double width = 1342.0;
  double height = 1342.0;
  std::size_t n_nodes = 100;
  double max_speed = 20.0;
  double min_speed = 0.1;
  double pause_time = 0.0;
  double duration = 500.0;
};

/// Per-node random waypoint itineraries with continuous position lookup.
class WaypointTrace {
 public:
  /// Validates every itinerary (bounds, strictly increasing arrivals,
  /// coverage of [0, duration]); throws std::invalid_argument otherwise.
  WaypointTrace(std::vector<std::vector<Waypoint>> itineraries, double width, double height, double duration);

  /// Nodes that never move. Width/height default to the bounding box.
  static WaypointTrace stationary(const std::vector<Vec2>& positions, double duration);

  std::size_t node_count() const { return itineraries_.size(); }
  double duration() const { return duration_; }
  double width() const { return width_; }
  double height() const { return height_; }
  const std::vector<Waypoint>& itinerary(NodeId node) const { return itineraries_.at(node); }

  /// Throws std::out_of_range for t outside [0, duration].
  Vec2 position_at(NodeId node, double t) const;

  /// Closed unit disk: true iff distance <= radio_range.
  bool in_range(NodeId a, NodeId b, double t, double radio_range) const;

  /// Positions of every node at t.
  std::vector<Vec2> snapshot(double t) const;

  /// `node<TAB>arrival_time<TAB>x<TAB>y<TAB>pause_until<TAB>speed`, one line per waypoint.
  void write_tsv(std::ostream& out) const;

 private:
  std::vector<std::vector<Waypoint>> itineraries_;
  double width_;
  double height_;
  double duration_;
};

/// Random waypoint: uniform initial positions, each node first pauses for
/// pause_time, then travels to a uniform destination at a speed uniform in
/// (min_speed, max_speed], pauses again, and so on until `duration`.
WaypointTrace generate_trace(const MobilityParams& params, std::uint64_t seed);

}  // namespace manet
