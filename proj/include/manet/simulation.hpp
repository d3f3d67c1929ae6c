#pragma once

#include <cstdint>
#include <vector>

#include "manet/dsr.hpp"
#include "manet/engine.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/netlink.hpp"
#include "manet/workload.hpp"

namespace manet {

/// One self-contained run: trace, traffic, medium, routing and ledger.
/// Everything is owned here so independent runs can execute on separate
/// threads.
class Simulation {
 public:
  Simulation(WaypointTrace trace, std::vector<Flow> flows, NetConfig net, DsrConfig dsr, std::uint64_t seed,
             EventLog::Sink log_sink = {});

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  Dsr& dsr() { return dsr_; }
  Netlink& netlink() { return net_; }
  Scheduler& scheduler() { return sched_; }
  const WaypointTrace& trace() const { return trace_; }
  const MetricsLedger& ledger() const { return ledger_; }

  /// Schedules a single DATA origination outside the flow list.
  void originate_at(SimTime at, NodeId src, NodeId dst);

  /// Runs to the end of the trace and books the residue as Simulation End.
  const MetricsLedger& run();
  /// Runs to `t` without end-of-run accounting (for stepping in tests).
  void run_until(SimTime t) { sched_.run_until(t); }

 private:
  void emit(std::size_t flow_index, std::uint64_t seq);

  WaypointTrace trace_;
  std::vector<Flow> flows_;
  EventLog log_;
  Scheduler sched_;
  MetricsLedger ledger_;
  Netlink net_;
  Dsr dsr_;
  bool finished_ = false;
};

}  // namespace manet
