#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "manet/engine.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/netlink.hpp"
#include "manet/packet.hpp"
#include "manet/route_cache.hpp"
#include "manet/suppress.hpp"

namespace manet {

struct DsrConfig {
  bool ring_zero = true;
  bool suppression = false;  // DSR+S
  ReplyLengthMode reply_length_mode = ReplyLengthMode::kFull;
  SimTime record_ttl = SimTime::from_seconds(10.0);

  SimTime ring_zero_timeout = SimTime::from_ms(30);
  SimTime reply_delay_unit = SimTime::from_ms(2);
  SimTime rreq_jitter = SimTime::from_ms(40);
  SimTime send_buffer_timeout = SimTime::from_seconds(30.0);
  std::size_t send_buffer_capacity = 64;
  int max_discovery_retries = 8;
  SimTime discovery_backoff_initial = SimTime::from_ms(500);
  SimTime discovery_backoff_max = SimTime::from_seconds(10.0);
  std::uint32_t data_ttl = 64;
  std::uint32_t flood_hop_limit = 16;
  SimTime grat_holdoff = SimTime::from_seconds(1.0);
  std::uint32_t max_salvage = 15;
  // Off-route overhearing also caches [self] + the route onward from the transmitter.
  bool cache_off_route = false;
};

/// Length-proportional reply deferral: hops * unit + uniform jitter in [0, unit).
SimTime reply_storm_delay(std::size_t route_hops, SimTime unit, RngStream& rng);

/// Joins `accumulated` (S .. previous hop) with a cached path that starts at
/// the replying node. Nullopt if the result would repeat a node.
std::optional<Route> splice_reply(const Route& accumulated, const Route& cached_suffix);

/// DSR for every node of one run, with the native optimisations (Ring Zero,
/// overheard-route caching, reply-storm deferral, salvaging, gratuitous
/// replies) and the optional reply suppression.
class Dsr final : public LinkListener {
 public:
  Dsr(Scheduler& sched, Netlink& net, const WaypointTrace& trace, DsrConfig cfg, MetricsLedger& ledger, EventLog& log,
      std::uint64_t seed);

  /// Hands a new DATA packet to the routing layer at `src`.
  void originate_data(NodeId src, NodeId dst, std::uint32_t flow = 0, std::uint64_t seq = 0);

  RouteCache& cache(NodeId node) { return nodes_.at(node).cache; }
  const RouteCache& cache(NodeId node) const { return nodes_.at(node).cache; }
  const SuppressionTable& suppression(NodeId node) const { return nodes_.at(node).suppression; }
  bool discovery_pending(NodeId src, NodeId dst) const { return nodes_.at(src).discoveries.count(dst) > 0; }
  std::size_t send_buffer_size(NodeId node) const { return nodes_.at(node).send_buffer.size(); }
  std::size_t deferred_replies(NodeId node) const { return nodes_.at(node).deferred.size(); }
  bool has_seen(NodeId node, RreqKey key) const { return nodes_.at(node).seen.count(key) > 0; }
  const DsrConfig& config() const { return cfg_; }

  /// DATA packets still inside the network (send buffers, interface queues,
  /// MAC). Must equal `live_data()` at any instant.
  std::uint64_t resident_data() const;
  std::uint64_t live_data() const { return live_data_; }
  /// Books every resident DATA packet as a Simulation End drop.
  void account_simulation_end();

  // LinkListener
  void on_receive(NodeId node, NodeId from, Packet packet) override;
  void on_overhear(NodeId node, const Frame& frame) override;
  void on_link_break(NodeId node, NodeId next_hop, Packet packet) override;
  void on_transmit(NodeId node, const Frame& frame) override;
  void on_queue_drop(NodeId node, Packet packet) override;

 private:
  struct Discovery {
    SimTime started;
    bool flooding = false;
    int retries = 0;
    EventHandle timer;
  };
  struct DeferredReply {
    EventHandle handle;
    RreqKey key;
    NodeId target;
    std::size_t route_hops;
  };
  struct Buffered {
    Data data;
    EventHandle expiry;
  };
  struct NodeState {
    NodeState(NodeId id, std::uint64_t seed, SimTime record_ttl)
        : cache(id), suppression(record_ttl), jitter_rng(seed, "jitter", id), reply_rng(seed, "reply-delay", id) {}
    RouteCache cache;
    SuppressionTable suppression;
    std::set<RreqKey> seen;
    std::uint32_t next_rreq_id = 1;
    std::map<NodeId, Discovery> discoveries;
    std::vector<DeferredReply> deferred;
    std::map<std::uint64_t, Buffered> send_buffer;  // by packet uid
    std::map<std::pair<NodeId, NodeId>, SimTime> grat_sent;
    RngStream jitter_rng;
    RngStream reply_rng;
  };

  // discovery
  void start_discovery(NodeId src, NodeId dst);
  void send_rreq(NodeId src, NodeId dst, bool propagating);
  void on_discovery_timeout(NodeId src, NodeId dst);
  void resolve_discovery(NodeId src, NodeId dst, const Rrep* first_reply);
  void handle_rreq(NodeId node, Rreq rreq);
  void defer_cached_reply(NodeId node, const Rreq& rreq, Route returned);
  void send_rrep(NodeId node, Route returned, RreqKey key, RrepClass kind);
  void handle_rrep(NodeId node, Rrep rrep);

  // data path
  void send_with_route(NodeId node, Data data, Route route);
  void buffer_data(NodeId node, Data data);
  void flush_send_buffer(NodeId node, NodeId dst);
  void forward_data(NodeId node, Data data);
  void deliver(NodeId node, Data& data);
  void drop_data(NodeId node, const Data& data, DropReason reason);

  // maintenance
  void handle_rerr(NodeId node, Rerr rerr);
  void send_rerr(NodeId node, const Data& data, NodeId broken_to);
  void salvage(NodeId node, Data data);

  // overhearing
  void learn_route(NodeId node, const Route& route, std::optional<NodeId> heard_from);
  void cache_overheard(NodeId node, const Frame& frame);
  void check_reply_cancel(NodeId node, const Data& data);
  void maybe_gratuitous_reply(NodeId node, const Frame& frame, const Data& data);

  void enqueue(NodeId node, Packet packet, NodeId next_hop);

  Scheduler& sched_;
  Netlink& net_;
  const WaypointTrace& trace_;
  DsrConfig cfg_;
  MetricsLedger& ledger_;
  EventLog& log_;
  std::vector<NodeState> nodes_;
  std::uint64_t next_uid_ = 1;
  std::uint64_t live_data_ = 0;
};

}  // namespace manet
