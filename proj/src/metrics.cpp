#include "manet/metrics.hpp"

#include <cmath>
#include <deque>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace manet {

const char* drop_reason_name(DropReason r) {
  switch (r) {
    case DropReason::kNoRoute: return "No Route";
    case DropReason::kTtlExpired: return "TTL Expired";
    case DropReason::kRtrQueueFull: return "RTR Queue Full";
    case DropReason::kTimeout: return "Timeout";
    case DropReason::kRoutingLoop: return "Routing Loop";
    case DropReason::kIfqFull: return "IFQ Full";
    case DropReason::kArpFull: return "ARP Full";
    case DropReason::kMacCallback: return "MAC Callback";
    case DropReason::kSimulationEnd: return "Simulation End";
  }
  return "?";
}

const char* drop_reason_key(DropReason r) {
  switch (r) {
    case DropReason::kNoRoute: return "no_route";
    case DropReason::kTtlExpired: return "ttl_expired";
    case DropReason::kRtrQueueFull: return "rtr_queue_full";
    case DropReason::kTimeout: return "timeout";
    case DropReason::kRoutingLoop: return "routing_loop";
    case DropReason::kIfqFull: return "ifq_full";
    case DropReason::kArpFull: return "arp_full";
    case DropReason::kMacCallback: return "mac_callback";
    case DropReason::kSimulationEnd: return "simulation_end";
  }
  return "?";
}

std::uint64_t MetricsLedger::total_drops() const { return std::accumulate(drops.begin(), drops.end(), std::uint64_t{0}); }

std::uint64_t MetricsLedger::discovery_overhead() const {
  return tx_count(TxKind::kRreq) + tx_count(TxKind::kCachedRrep) + tx_count(TxKind::kTargetRrep);
}

std::uint64_t MetricsLedger::total_overhead() const {
  return discovery_overhead() + tx_count(TxKind::kGratuitousRrep) + tx_count(TxKind::kRerr);
}

std::optional<double> MetricsLedger::delivery_ratio_pct() const {
  if (sent == 0) return std::nullopt;
  return 100.0 * static_cast<double>(delivered) / static_cast<double>(sent);
}

std::optional<double> MetricsLedger::cache_hit_rate() const {
  const auto lookups = cache_hits + cache_misses;
  if (lookups == 0) return std::nullopt;
  return static_cast<double>(cache_hits) / static_cast<double>(lookups);
}

RrepClass classify_rrep(const Rrep& rrep) {
  if (rrep.gratuitous) return RrepClass::kGratuitous;
  if (!rrep.returned_route.empty() && rrep.replying_node == rrep.returned_route.back()) return RrepClass::kTarget;
  return RrepClass::kCached;
}

std::optional<std::size_t> shortest_hops(std::span<const Vec2> positions, NodeId src, NodeId dst, double radio_range) {
  if (src == dst) return 0;
  const std::size_t n = positions.size();
  std::vector<std::size_t> dist(n, SIZE_MAX);
  std::deque<NodeId> frontier{src};
  dist[src] = 0;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (NodeId v = 0; v < n; ++v) {
      if (dist[v] != SIZE_MAX || distance(positions[u], positions[v]) > radio_range) continue;
      dist[v] = dist[u] + 1;
      if (v == dst) return dist[v];
      frontier.push_back(v);
    }
  }
  return std::nullopt;
}

PathOptimality path_optimality(std::size_t actual_hops, std::optional<std::size_t> optimal_hops) {
  if (!optimal_hops) return {0, true};
  if (actual_hops < *optimal_hops) return {0, true};
  return {actual_hops - *optimal_hops, false};
}

std::size_t path_bucket(std::size_t extra_hops) { return extra_hops > 3 ? 4 : extra_hops; }

std::optional<NormalizedOverhead> normalized_overhead(const MetricsLedger& l) {
  if (l.delivered == 0) return std::nullopt;
  const double d = static_cast<double>(l.delivered);
  return NormalizedOverhead{static_cast<double>(l.discovery_overhead()) / d,
                            static_cast<double>(l.total_overhead()) / d};
}

double t_quantile_975(std::size_t dof) {
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

SummaryStat summarize(std::span<const double> values) {
  SummaryStat s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.half_width_95 = t_quantile_975(s.n - 1) * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

namespace {

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<MetricValue> run_metrics(const MetricsLedger& l) {
  auto num = [](std::uint64_t v) { return std::optional<double>(static_cast<double>(v)); };
  std::vector<MetricValue> out;
  out.push_back({"sent", num(l.sent)});
  out.push_back({"delivered", num(l.delivered)});
  out.push_back({"delivery_ratio", l.delivery_ratio_pct()});
  out.push_back({"rreq_tx", num(l.tx_count(TxKind::kRreq))});
  out.push_back({"cached_rrep_tx", num(l.tx_count(TxKind::kCachedRrep))});
  out.push_back({"target_rrep_tx", num(l.tx_count(TxKind::kTargetRrep))});
  out.push_back({"gratuitous_rrep_tx", num(l.tx_count(TxKind::kGratuitousRrep))});
  out.push_back({"rerr_tx", num(l.tx_count(TxKind::kRerr))});
  out.push_back({"data_tx", num(l.tx_count(TxKind::kData))});
  out.push_back({"discovery_overhead", num(l.discovery_overhead())});
  out.push_back({"total_overhead", num(l.total_overhead())});
  const auto norm = normalized_overhead(l);
  out.push_back({"normalized_discovery_overhead", norm ? std::optional(norm->discovery) : std::nullopt});
  out.push_back({"normalized_total_overhead", norm ? std::optional(norm->total) : std::nullopt});
  const auto lat = mean_of(l.discovery_latency);
  out.push_back({"discovery_latency_ms", lat ? std::optional(*lat * 1e3) : std::nullopt});
  const auto e2e = mean_of(l.e2e_delay);
  out.push_back({"e2e_delay_ms", e2e ? std::optional(*e2e * 1e3) : std::nullopt});
  std::vector<double> hops(l.first_rrep_hops.begin(), l.first_rrep_hops.end());
  out.push_back({"first_rrep_hops", mean_of(hops)});
  out.push_back({"cache_hit_rate", l.cache_hit_rate()});
  const std::uint64_t opt_total = std::accumulate(l.path_extra.begin(), l.path_extra.end(), std::uint64_t{0});
  static constexpr const char* kBucketNames[kPathBuckets] = {"path_extra_0", "path_extra_1", "path_extra_2",
                                                             "path_extra_3", "path_extra_gt3"};
  for (std::size_t b = 0; b < kPathBuckets; ++b)
    out.push_back({kBucketNames[b], opt_total ? std::optional(static_cast<double>(l.path_extra[b]) /
                                                              static_cast<double>(opt_total))
                                              : std::nullopt});
  out.push_back({"discoveries", num(l.discoveries)});
  out.push_back({"floods", num(l.floods)});
  out.push_back({"suppressed", num(l.suppressed)});
  for (std::size_t r = 0; r < kDropReasonCount; ++r)
    out.push_back({std::string("drop_") + drop_reason_key(static_cast<DropReason>(r)), num(l.drops[r])});
  return out;
}

}  // namespace manet
