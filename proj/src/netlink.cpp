#include "manet/netlink.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace manet {

InterfaceQueue::PushResult InterfaceQueue::push(QueuedPacket item) {
  PushResult res;
  const bool control = is_control(item.packet);
  if (size() < capacity_) {
    (control ? control_ : data_).push_back(std::move(item));
    res.accepted = true;
  } else if (control && !data_.empty()) {
    res.dropped = std::move(data_.back());
    data_.pop_back();
    control_.push_back(std::move(item));
    res.accepted = true;
  } else {
    res.dropped = std::move(item);
  }
  assert(size() <= capacity_);
  return res;
}

std::optional<QueuedPacket> InterfaceQueue::pop() {
  auto& band = !control_.empty() ? control_ : data_;
  if (band.empty()) return std::nullopt;
  QueuedPacket out = std::move(band.front());
  band.pop_front();
  return out;
}

Netlink::Netlink(Scheduler& sched, const WaypointTrace& trace, NetConfig cfg, EventLog& log, std::uint64_t seed)
    : sched_(sched), trace_(trace), cfg_(cfg), log_(log) {
  if (cfg_.backoff_slot <= SimTime{} || cfg_.backoff_max < cfg_.backoff_slot)
    throw std::invalid_argument("netlink: backoff window must hold at least one slot");
  if (cfg_.max_mac_retries < 1) throw std::invalid_argument("netlink: max_mac_retries must be >= 1");
  macs_.reserve(trace.node_count());
  for (NodeId n = 0; n < trace.node_count(); ++n) macs_.emplace_back(cfg_.ifq_capacity, RngStream(seed, "mac-backoff", n));
}

SimTime Netlink::airtime(std::size_t bytes) const {
  return SimTime::from_ns(std::llround(static_cast<double>(bytes) * 8.0 * 1e9 / cfg_.bandwidth_bps));
}

const Packet* Netlink::in_service(NodeId node) const {
  const auto& m = macs_.at(node);
  return m.current ? &m.current->packet : nullptr;
}

EnqueueResult Netlink::enqueue(NodeId node, Packet packet, NodeId next_hop) {
  if (next_hop == node) throw std::logic_error("netlink: unicast to self");
  auto res = macs_.at(node).ifq.push(QueuedPacket{std::move(packet), next_hop});
  if (res.dropped) {
    log_.write(sched_.now(), node, "DROP", "IfqFull {}", describe(res.dropped->packet));
    if (listener_) listener_->on_queue_drop(node, std::move(res.dropped->packet));
  }
  if (res.accepted) kick(node);
  return res.accepted ? EnqueueResult::kAccepted : EnqueueResult::kDropped;
}

void Netlink::kick(NodeId node) {
  auto& m = macs_[node];
  if (m.current || m.ifq.empty()) return;
  m.current = m.ifq.pop();
  m.attempts = 0;
  carrier_sense(node);
}

bool Netlink::medium_busy(NodeId node) const {
  const SimTime now = sched_.now();
  if (active_.empty()) return false;
  const double t = now.seconds();
  const Vec2 here = trace_.position_at(node, t);
  for (const auto& tx : active_) {
    if (tx.src == node || !(tx.start < now) || !(now < tx.end)) continue;
    if (distance(here, trace_.position_at(tx.src, t)) <= cfg_.radio_range) return true;
  }
  return false;
}

void Netlink::carrier_sense(NodeId node) {
  if (medium_busy(node))
    backoff(node);
  else
    start_tx(node);
}

void Netlink::backoff(NodeId node) {
  auto& m = macs_[node];
  const std::int64_t slots = cfg_.backoff_max.ns() / cfg_.backoff_slot.ns();
  const auto k = static_cast<std::int64_t>(m.backoff_rng.uniform_int(1, static_cast<std::uint64_t>(slots)));
  sched_.schedule_in(cfg_.backoff_slot * k, [this, node] { carrier_sense(node); });
}

void Netlink::corrupt(NodeId receiver, Reception& r) {
  if (r.corrupted) return;
  r.corrupted = true;
  ++stats_.collisions;
  log_.write(sched_.now(), receiver, "COLLISION", "tx={}", r.tx_id);
}

void Netlink::start_tx(NodeId node) {
  auto& m = macs_[node];
  assert(m.current);
  const SimTime now = sched_.now();
  const Packet& pkt = m.current->packet;
  Transmission tx{next_tx_id_++, node, m.current->next_hop, now, now, packet_size(pkt, cfg_.sizes), {}};
  tx.end = now + airtime(tx.size);
  m.tx_until = tx.end;
  ++m.attempts;
  ++stats_.transmissions;
  if (m.attempts > 1) ++stats_.retries;

  // Half duplex: anything this node was receiving is lost.
  for (auto& r : m.incoming) corrupt(node, r);

  const double t = now.seconds();
  const Vec2 here = trace_.position_at(node, t);
  for (NodeId n = 0; n < macs_.size(); ++n) {
    if (n == node || distance(here, trace_.position_at(n, t)) > cfg_.radio_range) continue;
    tx.receivers.push_back(n);
    auto& rm = macs_[n];
    Reception rec{tx.id, false};
    const bool overlap = rm.tx_until > now || !rm.incoming.empty();
    for (auto& other : rm.incoming) corrupt(n, other);
    rm.incoming.push_back(rec);
    if (overlap) corrupt(n, rm.incoming.back());
  }

  const Frame frame{node, tx.dst, &pkt, tx.size, tx.start, tx.end};
  if (log_.enabled())
    log_.write(now, node, "TX", "{} to={} bytes={} try={} id={}", tx_kind_name(tx_kind(pkt)),
               tx.dst == kBroadcast ? std::string("*") : std::to_string(tx.dst), tx.size, m.attempts, tx.id);
  if (m.attempts == 1 && listener_) listener_->on_transmit(node, frame);

  const std::uint64_t id = tx.id;
  const SimTime done = tx.end + cfg_.prop_delay;
  active_.push_back(std::move(tx));
  sched_.schedule(done, [this, id] { finish_tx(id); });
}

void Netlink::finish_tx(std::uint64_t tx_id) {
  auto it = std::find_if(active_.begin(), active_.end(), [&](const Transmission& t) { return t.id == tx_id; });
  assert(it != active_.end());
  Transmission tx = std::move(*it);
  active_.erase(it);
  const SimTime now = sched_.now();

  std::vector<NodeId> ok;
  ok.reserve(tx.receivers.size());
  for (NodeId r : tx.receivers) {
    auto& inc = macs_[r].incoming;
    auto rit = std::find_if(inc.begin(), inc.end(), [&](const Reception& x) { return x.tx_id == tx_id; });
    assert(rit != inc.end());
    if (!rit->corrupted) ok.push_back(r);
    inc.erase(rit);
  }

  auto& m = macs_[tx.src];
  assert(m.current);
  const Frame frame{tx.src, tx.dst, &m.current->packet, tx.size, tx.start, tx.end};

  if (tx.dst == kBroadcast) {
    Packet pkt = std::move(m.current->packet);
    m.current.reset();
    for (NodeId r : ok) {
      log_.write(now, r, "RX", "from={} tx={}", tx.src, tx_id);
      if (listener_) listener_->on_receive(r, tx.src, pkt);
    }
    kick(tx.src);
    return;
  }

  bool delivered = false;
  for (NodeId r : ok) {
    if (r == tx.dst) {
      delivered = true;
      continue;
    }
    log_.write(now, r, "OVERHEAR", "from={} to={} tx={}", tx.src, tx.dst, tx_id);
    if (listener_) listener_->on_overhear(r, frame);
  }

  if (delivered) {
    Packet pkt = std::move(m.current->packet);
    m.current.reset();
    log_.write(now, tx.dst, "RX", "from={} tx={}", tx.src, tx_id);
    if (listener_) listener_->on_receive(tx.dst, tx.src, std::move(pkt));
    kick(tx.src);
    return;
  }

  const NodeId src = tx.src;
  const SimTime resume = tx.end + cfg_.ack_window;
  if (m.attempts < cfg_.max_mac_retries) {
    sched_.schedule(resume, [this, src] { backoff(src); });
    return;
  }
  sched_.schedule(resume, [this, src] {
    auto& mm = macs_[src];
    QueuedPacket qp = std::move(*mm.current);
    mm.current.reset();
    ++stats_.link_breaks;
    log_.write(sched_.now(), src, "LINKBREAK", "next={}", qp.next_hop);
    if (listener_) listener_->on_link_break(src, qp.next_hop, std::move(qp.packet));
    kick(src);
  });
}

}  // namespace manet
