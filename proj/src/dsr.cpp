#include "manet/dsr.hpp"

#include <algorithm>
#include <cassert>

namespace manet {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Route reversed_prefix(const Route& route, std::size_t last_index) {
  Route out(route.begin(), route.begin() + static_cast<std::ptrdiff_t>(last_index + 1));
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<std::size_t> index_of(const Route& route, NodeId node) {
  auto it = std::find(route.begin(), route.end(), node);
  if (it == route.end()) return std::nullopt;
  return static_cast<std::size_t>(it - route.begin());
}

const char* rrep_log_kind(RrepClass k) {
  switch (k) {
    case RrepClass::kCached: return "RREP-CACHED";
    case RrepClass::kTarget: return "RREP-TARGET";
    case RrepClass::kGratuitous: return "RREP-GRAT";
  }
  return "RREP";
}

}  // namespace

SimTime reply_storm_delay(std::size_t route_hops, SimTime unit, RngStream& rng) {
  const auto jitter = SimTime::from_ns(static_cast<std::int64_t>(rng.uniform() * static_cast<double>(unit.ns())));
  return unit * static_cast<std::int64_t>(route_hops) + jitter;
}

std::optional<Route> splice_reply(const Route& accumulated, const Route& cached_suffix) {
  Route out = accumulated;
  out.insert(out.end(), cached_suffix.begin(), cached_suffix.end());
  if (!is_loop_free(out)) return std::nullopt;
  return out;
}

Dsr::Dsr(Scheduler& sched, Netlink& net, const WaypointTrace& trace, DsrConfig cfg, MetricsLedger& ledger,
         EventLog& log, std::uint64_t seed)
    : sched_(sched), net_(net), trace_(trace), cfg_(cfg), ledger_(ledger), log_(log) {
  nodes_.reserve(trace.node_count());
  for (NodeId n = 0; n < trace.node_count(); ++n) nodes_.emplace_back(n, seed, cfg_.record_ttl);
  net_.set_listener(this);
}

// ---------------------------------------------------------------------------
// Origination and the send buffer

void Dsr::originate_data(NodeId src, NodeId dst, std::uint32_t flow, std::uint64_t seq) {
  assert(src != dst);
  Data d;
  d.hops.path = {src, dst};
  d.ttl = cfg_.data_ttl;
  d.uid = next_uid_++;
  d.flow = flow;
  d.seq = seq;
  d.origination = sched_.now();
  ++ledger_.sent;
  ++live_data_;

  auto& st = nodes_[src];
  if (auto route = st.cache.lookup(dst)) {
    ++ledger_.cache_hits;
    send_with_route(src, std::move(d), std::move(*route));
    return;
  }
  ++ledger_.cache_misses;
  buffer_data(src, std::move(d));
  if (!st.discoveries.count(dst)) start_discovery(src, dst);
}

void Dsr::send_with_route(NodeId node, Data data, Route route) {
  assert(route.size() >= 2 && route.front() == node);
  const NodeId next = route[1];
  data.hops = Hops{std::move(route), 0};
  enqueue(node, std::move(data), next);
}

void Dsr::buffer_data(NodeId node, Data data) {
  auto& st = nodes_[node];
  if (st.send_buffer.size() >= cfg_.send_buffer_capacity) {
    drop_data(node, data, DropReason::kRtrQueueFull);
    return;
  }
  const std::uint64_t uid = data.uid;
  auto handle = sched_.schedule_in(cfg_.send_buffer_timeout, [this, node, uid] {
    auto& sb = nodes_[node].send_buffer;
    auto it = sb.find(uid);
    if (it == sb.end()) return;
    Data expired = std::move(it->second.data);
    sb.erase(it);
    drop_data(node, expired, DropReason::kTimeout);
  });
  st.send_buffer.emplace(uid, Buffered{std::move(data), handle});
}

void Dsr::flush_send_buffer(NodeId node, NodeId dst) {
  auto& st = nodes_[node];
  auto route = st.cache.lookup(dst);
  if (!route) return;
  for (auto it = st.send_buffer.begin(); it != st.send_buffer.end();) {
    if (it->second.data.destination() != dst) {
      ++it;
      continue;
    }
    sched_.cancel(it->second.expiry);
    Data d = std::move(it->second.data);
    it = st.send_buffer.erase(it);
    send_with_route(node, std::move(d), *route);
  }
}

// ---------------------------------------------------------------------------
// Route discovery

void Dsr::start_discovery(NodeId src, NodeId dst) {
  auto& st = nodes_[src];
  assert(!st.discoveries.count(dst));
  ++ledger_.discoveries;
  Discovery& d = st.discoveries[dst];
  d.started = sched_.now();
  if (cfg_.ring_zero) {
    send_rreq(src, dst, false);
    d.timer = sched_.schedule_in(cfg_.ring_zero_timeout, [this, src, dst] { on_discovery_timeout(src, dst); });
  } else {
    d.flooding = true;
    send_rreq(src, dst, true);
    d.timer = sched_.schedule_in(cfg_.discovery_backoff_initial, [this, src, dst] { on_discovery_timeout(src, dst); });
  }
}

void Dsr::send_rreq(NodeId src, NodeId dst, bool propagating) {
  auto& st = nodes_[src];
  Rreq q;
  q.source = src;
  q.target = dst;
  q.id = st.next_rreq_id++;
  q.accumulated = {src};
  q.hop_limit = propagating ? cfg_.flood_hop_limit : 1;
  q.propagating = propagating;
  st.seen.insert(q.key());
  if (propagating) ++ledger_.floods;
  if (log_.enabled()) log_.write(sched_.now(), src, "RREQ", "{}", describe(q));
  enqueue(src, std::move(q), kBroadcast);
}

void Dsr::on_discovery_timeout(NodeId src, NodeId dst) {
  auto& st = nodes_[src];
  auto it = st.discoveries.find(dst);
  if (it == st.discoveries.end()) return;
  Discovery& d = it->second;

  if (st.cache.lookup_hops(dst)) {
    resolve_discovery(src, dst, nullptr);
    return;
  }
  const bool waiting = std::any_of(st.send_buffer.begin(), st.send_buffer.end(),
                                   [&](const auto& kv) { return kv.second.data.destination() == dst; });
  if (!waiting) {
    st.discoveries.erase(it);
    return;
  }

  if (!d.flooding) {
    d.flooding = true;
    send_rreq(src, dst, true);
    d.timer = sched_.schedule_in(cfg_.discovery_backoff_initial, [this, src, dst] { on_discovery_timeout(src, dst); });
    return;
  }
  if (d.retries < cfg_.max_discovery_retries) {
    ++d.retries;
    send_rreq(src, dst, true);
    SimTime wait = cfg_.discovery_backoff_initial;
    for (int i = 0; i < d.retries && wait < cfg_.discovery_backoff_max; ++i) wait = wait * 2;
    wait = std::min(wait, cfg_.discovery_backoff_max);
    d.timer = sched_.schedule_in(wait, [this, src, dst] { on_discovery_timeout(src, dst); });
    return;
  }

  st.discoveries.erase(it);
  for (auto b = st.send_buffer.begin(); b != st.send_buffer.end();) {
    if (b->second.data.destination() != dst) {
      ++b;
      continue;
    }
    sched_.cancel(b->second.expiry);
    Data lost = std::move(b->second.data);
    b = st.send_buffer.erase(b);
    drop_data(src, lost, DropReason::kNoRoute);
  }
}

void Dsr::resolve_discovery(NodeId src, NodeId dst, const Rrep* first_reply) {
  auto& st = nodes_[src];
  auto it = st.discoveries.find(dst);
  if (it != st.discoveries.end()) {
    if (first_reply) {
      ledger_.discovery_latency.push_back((sched_.now() - it->second.started).seconds());
      ledger_.first_rrep_hops.push_back(static_cast<std::uint32_t>(first_reply->hops.path.size() - 1));
    }
    sched_.cancel(it->second.timer);
    st.discoveries.erase(it);
  }
  flush_send_buffer(src, dst);
}

void Dsr::handle_rreq(NodeId node, Rreq rreq) {
  auto& st = nodes_[node];
  if (!st.seen.insert(rreq.key()).second) return;  // duplicate (or our own request)

  if (node == rreq.target) {
    Route returned = rreq.accumulated;
    returned.push_back(node);
    st.cache.insert(reversed_prefix(returned, returned.size() - 1), sched_.now());
    send_rrep(node, std::move(returned), rreq.key(), RrepClass::kTarget);
    return;
  }

  std::optional<Route> reply;
  std::size_t suffix_hops = 0;
  if (auto suffix = st.cache.lookup(rreq.target)) {
    suffix_hops = suffix->size() - 1;
    reply = splice_reply(rreq.accumulated, *suffix);
  }

  if (cfg_.suppression && rreq.propagating) {
    std::optional<std::size_t> candidate;
    if (reply) candidate = candidate_reply_hops(rreq.accumulated, suffix_hops, cfg_.reply_length_mode);
    const RreqDecision decision = st.suppression.on_rreq(rreq, candidate, sched_.now());
    if (decision.verdict == RreqVerdict::kSuppressDiscard) {
      ++ledger_.suppressed;
      log_.write(sched_.now(), node, "SUPPRESS", "{} {} {} {}", rreq.source, rreq.id,
                 candidate ? std::to_string(*candidate) : std::string("-"), decision.recorded_hops);
      return;
    }
    if (decision.verdict == RreqVerdict::kReply) {
      defer_cached_reply(node, rreq, std::move(*reply));
      return;
    }
  }

  if (reply) {
    defer_cached_reply(node, rreq, std::move(*reply));
    return;
  }

  if (rreq.hop_limit <= 1) {
    log_.write(sched_.now(), node, "RREQ-LIMIT", "{} {}", rreq.source, rreq.id);
    return;
  }
  --rreq.hop_limit;
  rreq.accumulated.push_back(node);
  const auto jitter =
      SimTime::from_ns(static_cast<std::int64_t>(st.jitter_rng.uniform() * static_cast<double>(cfg_.rreq_jitter.ns())));
  sched_.schedule_in(jitter, [this, node, q = std::move(rreq)]() mutable {
    if (log_.enabled()) log_.write(sched_.now(), node, "RREQ-FWD", "{}", describe(q));
    enqueue(node, std::move(q), kBroadcast);
  });
}

void Dsr::defer_cached_reply(NodeId node, const Rreq& rreq, Route returned) {
  auto& st = nodes_[node];
  const std::size_t hops = returned.size() - 1;
  const SimTime delay = reply_storm_delay(hops, cfg_.reply_delay_unit, st.reply_rng);
  const RreqKey key = rreq.key();
  const NodeId target = rreq.target;
  auto handle = sched_.schedule_in(delay, [this, node, key, r = std::move(returned)]() mutable {
    auto& dq = nodes_[node].deferred;
    std::erase_if(dq, [&](const DeferredReply& d) { return d.key == key; });
    send_rrep(node, std::move(r), key, RrepClass::kCached);
  });
  st.deferred.push_back(DeferredReply{handle, key, target, hops});
}

void Dsr::send_rrep(NodeId node, Route returned, RreqKey key, RrepClass kind) {
  const auto pos = index_of(returned, node);
  assert(pos && *pos >= 1);
  Rrep r;
  r.hops = Hops{reversed_prefix(returned, *pos), 0};
  r.replying_node = node;
  r.for_rreq = key;
  r.gratuitous = kind == RrepClass::kGratuitous;
  r.returned_route = std::move(returned);
  r.kind = classify_rrep(r);
  assert(r.kind == kind);
  nodes_[node].cache.insert(r.hops.path, sched_.now());
  log_.write(sched_.now(), node, rrep_log_kind(r.kind), "{} {} {} route={}", key.source, key.id,
             r.returned_route.size() - 1, format_route(r.returned_route));
  const NodeId next = r.hops.next();
  enqueue(node, std::move(r), next);
}

void Dsr::handle_rrep(NodeId node, Rrep rrep) {
  ++rrep.hops.cursor;
  if (rrep.hops.cursor >= rrep.hops.path.size() || rrep.hops.holder() != node) {
    ++ledger_.control_drops;
    return;
  }
  learn_route(node, rrep.returned_route, std::nullopt);
  if (!rrep.hops.at_end()) {
    const NodeId next = rrep.hops.next();
    enqueue(node, std::move(rrep), next);
    return;
  }
  resolve_discovery(node, rrep.returned_route.back(), rrep.gratuitous ? nullptr : &rrep);
}

// ---------------------------------------------------------------------------
// Data forwarding

void Dsr::forward_data(NodeId node, Data data) {
  ++data.hops.cursor;
  ++data.hops_taken;
  if (data.hops.cursor >= data.hops.path.size() || data.hops.holder() != node) {
    drop_data(node, data, DropReason::kRoutingLoop);
    return;
  }
  learn_route(node, data.hops.path, std::nullopt);
  check_reply_cancel(node, data);

  if (data.ttl > 0) --data.ttl;
  if (data.ttl == 0) {
    drop_data(node, data, DropReason::kTtlExpired);
    return;
  }
  if (data.hops.at_end()) {
    deliver(node, data);
    return;
  }
  const NodeId next = data.hops.next();
  enqueue(node, std::move(data), next);
}

void Dsr::deliver(NodeId node, Data& data) {
  ++ledger_.delivered;
  --live_data_;
  ledger_.e2e_delay.push_back((sched_.now() - data.origination).seconds());
  const auto snapshot = trace_.snapshot(data.origination.seconds());
  const auto optimal = shortest_hops(snapshot, data.source(), node, net_.config().radio_range);
  const PathOptimality po = path_optimality(data.hops_taken, optimal);
  ++ledger_.path_extra[path_bucket(po.extra_hops)];
  if (po.anomaly) ++ledger_.path_anomalies;
  log_.write(sched_.now(), node, "DELIVER", "uid={} hops={} opt={}", data.uid, data.hops_taken,
             optimal ? std::to_string(*optimal) : std::string("-"));
}

void Dsr::drop_data(NodeId node, const Data& data, DropReason reason) {
  ledger_.count_drop(reason);
  --live_data_;
  log_.write(sched_.now(), node, "DROP", "{} uid={}", drop_reason_key(reason), data.uid);
}

// ---------------------------------------------------------------------------
// Route maintenance

void Dsr::on_link_break(NodeId node, NodeId next_hop, Packet packet) {
  nodes_[node].cache.purge_link(node, next_hop);
  std::visit(overloaded{
                 [&](Data& d) {
                   if (d.hops.cursor == 0) {
                     // Still at the source: pick another cached route or wait for a new one.
                     auto& st = nodes_[node];
                     const NodeId dst = d.destination();
                     if (auto route = st.cache.lookup(dst)) {
                       send_with_route(node, std::move(d), std::move(*route));
                       return;
                     }
                     d.hops = Hops{{node, dst}, 0};
                     buffer_data(node, std::move(d));
                     if (!st.discoveries.count(dst)) start_discovery(node, dst);
                     return;
                   }
                   send_rerr(node, d, next_hop);
                   salvage(node, std::move(d));
                 },
                 [&](auto& control) {
                   ++ledger_.control_drops;
                   log_.write(sched_.now(), node, "DROP", "mac_callback {}", describe(Packet{control}));
                 },
             },
             packet);
}

void Dsr::send_rerr(NodeId node, const Data& data, NodeId broken_to) {
  Rerr e;
  e.broken_from = node;
  e.broken_to = broken_to;
  e.notify = data.source();
  e.hops = Hops{reversed_prefix(data.hops.path, data.hops.cursor), 0};
  log_.write(sched_.now(), node, "RERR", "{}>{} notify={}", node, broken_to, e.notify);
  const NodeId next = e.hops.next();
  enqueue(node, std::move(e), next);
}

void Dsr::salvage(NodeId node, Data data) {
  if (data.salvage_count >= cfg_.max_salvage) {
    drop_data(node, data, DropReason::kMacCallback);
    return;
  }
  if (auto alt = nodes_[node].cache.lookup(data.destination())) {
    Route rerouted(data.hops.path.begin(), data.hops.path.begin() + static_cast<std::ptrdiff_t>(data.hops.cursor));
    rerouted.insert(rerouted.end(), alt->begin(), alt->end());
    if (is_loop_free(rerouted)) {
      log_.write(sched_.now(), node, "SALVAGE", "uid={} route={}", data.uid, format_route(rerouted));
      data.hops.path = std::move(rerouted);
      ++data.salvage_count;
      const NodeId next = data.hops.next();
      enqueue(node, std::move(data), next);
      return;
    }
  }
  drop_data(node, data, DropReason::kNoRoute);
}

void Dsr::handle_rerr(NodeId node, Rerr rerr) {
  ++rerr.hops.cursor;
  if (rerr.hops.cursor >= rerr.hops.path.size() || rerr.hops.holder() != node) {
    ++ledger_.control_drops;
    return;
  }
  nodes_[node].cache.purge_link(rerr.broken_from, rerr.broken_to);
  if (rerr.hops.at_end()) return;
  const NodeId next = rerr.hops.next();
  enqueue(node, std::move(rerr), next);
}

// ---------------------------------------------------------------------------
// Promiscuous listening

void Dsr::learn_route(NodeId node, const Route& route, std::optional<NodeId> heard_from) {
  auto& cache = nodes_[node].cache;
  const SimTime now = sched_.now();
  if (auto j = index_of(route, node)) {
    if (*j + 1 < route.size()) cache.insert(Route(route.begin() + static_cast<std::ptrdiff_t>(*j), route.end()), now);
    if (*j >= 1) cache.insert(reversed_prefix(route, *j), now);
    return;
  }
  if (!heard_from || !cfg_.cache_off_route) return;
  const auto k = index_of(route, *heard_from);
  if (!k) return;
  // Off the route but adjacent to the transmitter: reach both ends through it.
  Route forward{node};
  forward.insert(forward.end(), route.begin() + static_cast<std::ptrdiff_t>(*k), route.end());
  cache.insert(forward, now);
  Route backward{node};
  const Route rev = reversed_prefix(route, *k);
  backward.insert(backward.end(), rev.begin(), rev.end());
  cache.insert(backward, now);
}

void Dsr::cache_overheard(NodeId node, const Frame& frame) {
  std::visit(overloaded{
                 [&](const Rrep& r) {
                   learn_route(node, r.returned_route, frame.src);
                   if (!cfg_.suppression || r.gratuitous || r.returned_route.empty()) return;
                   auto& st = nodes_[node];
                   const SimTime now = sched_.now();
                   const SuppressionRecord* before = st.suppression.find(r.for_rreq, now);
                   const std::size_t old_len = before ? before->best_overheard_len : 0;
                   if (st.suppression.on_overhear_rrep(r, st.seen.count(r.for_rreq) > 0, now) ==
                       OverhearOutcome::kIgnored)
                     return;
                   const SuppressionRecord* rec = st.suppression.find(r.for_rreq, now);
                   if (rec && rec->best_overheard_len != old_len) {
                     ++ledger_.records;
                     log_.write(now, node, "RECORD", "{} {} {}", rec->rreq_source, rec->rreq_id,
                                rec->best_overheard_len);
                   }
                 },
                 [&](const Data& d) {
                   learn_route(node, d.hops.path, frame.src);
                   check_reply_cancel(node, d);
                   maybe_gratuitous_reply(node, frame, d);
                 },
                 [](const auto&) {},
             },
             frame.packet());
}

void Dsr::check_reply_cancel(NodeId node, const Data& data) {
  auto& st = nodes_[node];
  if (st.deferred.empty()) return;
  const std::size_t hops = data.hops.path.size() - 1;
  std::erase_if(st.deferred, [&](const DeferredReply& d) {
    if (d.key.source != data.source() || d.target != data.destination() || hops >= d.route_hops) return false;
    sched_.cancel(d.handle);
    log_.write(sched_.now(), node, "RREP-CANCEL", "{} {} {} {}", d.key.source, d.key.id, d.route_hops, hops);
    return true;
  });
}

void Dsr::maybe_gratuitous_reply(NodeId node, const Frame& frame, const Data& data) {
  const Route& path = data.hops.path;
  const std::size_t k = data.hops.cursor;
  if (k >= path.size() || path[k] != frame.src) return;
  const auto j = index_of(path, node);
  if (!j || *j <= k + 1) return;

  auto& st = nodes_[node];
  const auto key = std::make_pair(data.source(), data.destination());
  const SimTime now = sched_.now();
  if (auto it = st.grat_sent.find(key); it != st.grat_sent.end() && now - it->second < cfg_.grat_holdoff) return;
  st.grat_sent[key] = now;

  Route shortened(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k + 1));
  shortened.insert(shortened.end(), path.begin() + static_cast<std::ptrdiff_t>(*j), path.end());
  send_rrep(node, std::move(shortened), RreqKey{data.source(), 0}, RrepClass::kGratuitous);
}

// ---------------------------------------------------------------------------
// LinkListener

void Dsr::enqueue(NodeId node, Packet packet, NodeId next_hop) { net_.enqueue(node, std::move(packet), next_hop); }

void Dsr::on_receive(NodeId node, NodeId /*from*/, Packet packet) {
  std::visit(overloaded{
                 [&](Rreq& q) { handle_rreq(node, std::move(q)); },
                 [&](Rrep& r) { handle_rrep(node, std::move(r)); },
                 [&](Rerr& e) { handle_rerr(node, std::move(e)); },
                 [&](Data& d) { forward_data(node, std::move(d)); },
             },
             packet);
}

void Dsr::on_overhear(NodeId node, const Frame& frame) { cache_overheard(node, frame); }

void Dsr::on_transmit(NodeId /*node*/, const Frame& frame) { ledger_.count_tx(tx_kind(frame.packet())); }

void Dsr::on_queue_drop(NodeId node, Packet packet) {
  if (auto* d = std::get_if<Data>(&packet)) {
    drop_data(node, *d, DropReason::kIfqFull);
    return;
  }
  ++ledger_.control_drops;
}

std::uint64_t Dsr::resident_data() const {
  std::uint64_t n = 0;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    n += nodes_[id].send_buffer.size();
    net_.queue(id).for_each([&](const QueuedPacket& q) { n += std::holds_alternative<Data>(q.packet) ? 1 : 0; });
    if (const Packet* p = net_.in_service(id); p && std::holds_alternative<Data>(*p)) ++n;
  }
  return n;
}

void Dsr::account_simulation_end() {
  const std::uint64_t n = resident_data();
  ledger_.drops[static_cast<std::size_t>(DropReason::kSimulationEnd)] += n;
  live_data_ -= std::min(live_data_, n);
}

}  // namespace manet
