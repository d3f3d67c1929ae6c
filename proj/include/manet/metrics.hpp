#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "manet/mobility.hpp"
#include "manet/packet.hpp"

namespace manet {

/// Data packet drop reasons, in the row order of the drop summary table.
enum class DropReason {
  kNoRoute,
  kTtlExpired,
  kRtrQueueFull,
  kTimeout,
  kRoutingLoop,
  kIfqFull,
  kArpFull,  // not modelled; always zero
  kMacCallback,
  kSimulationEnd,
};
inline constexpr std::size_t kDropReasonCount = 9;

const char* drop_reason_name(DropReason r);
/// snake_case key, e.g. "no_route".
const char* drop_reason_key(DropReason r);

/// Extra-hop buckets {0, 1, 2, 3, >3}.
inline constexpr std::size_t kPathBuckets = 5;

/// Counters and samples for one simulation run.
struct MetricsLedger {
  std::array<std::uint64_t, kTxKindCount> tx{};
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::array<std::uint64_t, kDropReasonCount> drops{};
  std::vector<double> discovery_latency;  // seconds
  std::vector<double> e2e_delay;          // seconds
  std::vector<std::uint32_t> first_rrep_hops;
  std::array<std::uint64_t, kPathBuckets> path_extra{};
  std::uint64_t path_anomalies = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t discoveries = 0;
  std::uint64_t floods = 0;
  std::uint64_t suppressed = 0;
  std::uint64_t records = 0;
  std::uint64_t control_drops = 0;  // routing packets lost to queue overflow or link breaks

  std::uint64_t tx_count(TxKind k) const { return tx[static_cast<std::size_t>(k)]; }
  std::uint64_t drop_count(DropReason r) const { return drops[static_cast<std::size_t>(r)]; }
  void count_tx(TxKind k) { ++tx[static_cast<std::size_t>(k)]; }
  void count_drop(DropReason r) { ++drops[static_cast<std::size_t>(r)]; }

  std::uint64_t total_drops() const;
  /// RREQ + cached + target RREP transmissions.
  std::uint64_t discovery_overhead() const;
  /// Discovery overhead plus gratuitous RREP and RERR transmissions.
  std::uint64_t total_overhead() const;
  /// sent == delivered + all drops.
  bool conserved() const { return sent == delivered + total_drops(); }
  std::optional<double> delivery_ratio_pct() const;
  std::optional<double> cache_hit_rate() const;
};

/// Class of a reply at origination.
RrepClass classify_rrep(const Rrep& rrep);

/// BFS hop count between src and dst in the unit-disk graph over `positions`.
std::optional<std::size_t> shortest_hops(std::span<const Vec2> positions, NodeId src, NodeId dst, double radio_range);

struct PathOptimality {
  std::size_t extra_hops = 0;
  bool anomaly = false;  // no snapshot path, or actual shorter than the snapshot optimum
};

PathOptimality path_optimality(std::size_t actual_hops, std::optional<std::size_t> optimal_hops);
std::size_t path_bucket(std::size_t extra_hops);

struct NormalizedOverhead {
  double discovery = 0.0;
  double total = 0.0;
};

/// Overhead per delivered data packet; nullopt when nothing was delivered.
std::optional<NormalizedOverhead> normalized_overhead(const MetricsLedger& ledger);

struct SummaryStat {
  double mean = 0.0;
  std::optional<double> half_width_95;  // absent for n < 2
  std::size_t n = 0;
};

/// Two-sided 97.5% Student-t quantile with `dof` degrees of freedom.
double t_quantile_975(std::size_t dof);

SummaryStat summarize(std::span<const double> values);

struct MetricValue {
  std::string name;
  std::optional<double> value;
};

/// Every per-run scalar reported in the metrics CSV, in a fixed order.
std::vector<MetricValue> run_metrics(const MetricsLedger& ledger);

}  // namespace manet
