#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "manet/engine.hpp"
#include "manet/mobility.hpp"
#include "manet/packet.hpp"

namespace manet {

struct NetConfig {
  double radio_range = 250.0;
  double bandwidth_bps = 2e6;
  SimTime prop_delay = SimTime::from_us(1);
  int max_mac_retries = 3;  // total attempts per unicast hop
  std::size_t ifq_capacity = 50;
  SimTime backoff_max = SimTime::from_ms(2);
  SimTime backoff_slot = SimTime::from_us(20);
  SimTime ack_window = SimTime::from_ms(1);
  PacketSizes sizes;
};

struct QueuedPacket {
  Packet packet;
  NodeId next_hop = kBroadcast;
};

/// Two-band FIFO between the routing layer and the MAC. Routing control
/// packets are served before DATA. A full queue rejects incoming DATA; an
/// incoming control packet instead displaces the newest queued DATA packet.
class InterfaceQueue {
 public:
  explicit InterfaceQueue(std::size_t capacity) : capacity_(capacity) {}

  struct PushResult {
    bool accepted = false;
    std::optional<QueuedPacket> dropped;  // rejected incoming packet or displaced DATA
  };

  PushResult push(QueuedPacket item);
  std::optional<QueuedPacket> pop();

  std::size_t size() const { return control_.size() + data_.size(); }
  bool empty() const { return size() == 0; }
  std::size_t capacity() const { return capacity_; }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& q : control_) f(q);
    for (const auto& q : data_) f(q);
  }

 private:
  std::size_t capacity_;
  std::deque<QueuedPacket> control_;
  std::deque<QueuedPacket> data_;
};

/// A transmission on the shared medium. The payload stays owned by the
/// sender's MAC while on air.
struct Frame {
  NodeId src = 0;
  NodeId dst = kBroadcast;
  const Packet* payload = nullptr;
  std::size_t size = 0;
  SimTime tx_start{};
  SimTime tx_end{};

  const Packet& packet() const { return *payload; }
};

/// Upcalls from the medium into the routing layer.
class LinkListener {
 public:
  virtual ~LinkListener() = default;
  /// Frame addressed to `node` (unicast) or broadcast, received without collision.
  virtual void on_receive(NodeId node, NodeId from, Packet packet) = 0;
  /// Promiscuous copy of a unicast frame addressed to someone else.
  virtual void on_overhear(NodeId node, const Frame& frame) = 0;
  /// Unicast to `next_hop` failed after all MAC attempts.
  virtual void on_link_break(NodeId node, NodeId next_hop, Packet packet) = 0;
  /// First transmission attempt of a hop (retries are not reported).
  virtual void on_transmit(NodeId node, const Frame& frame) = 0;
  /// Packet dropped by a full interface queue.
  virtual void on_queue_drop(NodeId node, Packet packet) = 0;
};

enum class EnqueueResult { kAccepted, kDropped };

struct NetlinkStats {
  std::uint64_t transmissions = 0;
  std::uint64_t retries = 0;
  std::uint64_t collisions = 0;  // per-receiver losses
  std::uint64_t link_breaks = 0;
};

/// Unit-disk shared medium with sender-side carrier sense, slotted random
/// backoff, per-receiver collisions, promiscuous overhearing and unicast
/// retransmission with link-break feedback.
///
/// A transmission is sensed by nodes in range from the instant after it
/// starts; two senders starting in the same nanosecond do not see each other.
/// Acknowledgements are not put on the medium: a unicast attempt succeeds iff
/// the next hop received the frame intact, and a failed attempt is retried
/// after the ack window.
class Netlink {
 public:
  Netlink(Scheduler& sched, const WaypointTrace& trace, NetConfig cfg, EventLog& log, std::uint64_t seed);

  void set_listener(LinkListener* listener) { listener_ = listener; }

  EnqueueResult enqueue(NodeId node, Packet packet, NodeId next_hop);

  SimTime airtime(std::size_t bytes) const;
  const NetConfig& config() const { return cfg_; }
  std::size_t node_count() const { return macs_.size(); }

  const InterfaceQueue& queue(NodeId node) const { return macs_.at(node).ifq; }
  /// Packet the MAC currently holds (in backoff, on air or awaiting ack).
  const Packet* in_service(NodeId node) const;
  /// True while `node` senses a transmission from an in-range neighbour.
  bool medium_busy(NodeId node) const;

  const NetlinkStats& stats() const { return stats_; }

 private:
  struct Reception {
    std::uint64_t tx_id;
    bool corrupted;
  };
  struct Mac {
    explicit Mac(std::size_t cap, RngStream rng) : ifq(cap), backoff_rng(std::move(rng)) {}
    InterfaceQueue ifq;
    std::optional<QueuedPacket> current;
    int attempts = 0;
    SimTime tx_until{};
    std::vector<Reception> incoming;
    RngStream backoff_rng;
  };
  struct Transmission {
    std::uint64_t id;
    NodeId src;
    NodeId dst;
    SimTime start;
    SimTime end;
    std::size_t size;
    std::vector<NodeId> receivers;
  };

  void kick(NodeId node);
  void carrier_sense(NodeId node);
  void backoff(NodeId node);
  void start_tx(NodeId node);
  void finish_tx(std::uint64_t tx_id);
  void corrupt(NodeId receiver, Reception& r);

  Scheduler& sched_;
  const WaypointTrace& trace_;
  NetConfig cfg_;
  EventLog& log_;
  LinkListener* listener_ = nullptr;
  std::vector<Mac> macs_;
  std::vector<Transmission> active_;
  std::uint64_t next_tx_id_ = 1;
  NetlinkStats stats_;
};

}  // namespace manet
