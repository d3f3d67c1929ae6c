#include "manet/simulation.hpp"

#include <stdexcept>

namespace manet {

Simulation::Simulation(WaypointTrace trace, std::vector<Flow> flows, NetConfig net, DsrConfig dsr, std::uint64_t seed,
                       EventLog::Sink log_sink)
    : trace_(std::move(trace)),
      flows_(std::move(flows)),
      log_(std::move(log_sink)),
      net_(sched_, trace_, net, log_, seed),
      dsr_(sched_, net_, trace_, dsr, ledger_, log_, seed) {
  const SimTime end = SimTime::from_seconds(trace_.duration());
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const Flow& f = flows_[i];
    if (f.src >= trace_.node_count() || f.dst >= trace_.node_count() || f.src == f.dst)
      throw std::invalid_argument("simulation: flow endpoints invalid");
    if (f.start <= end) sched_.schedule(f.start, [this, i] { emit(i, 0); });
  }
}

void Simulation::emit(std::size_t flow_index, std::uint64_t seq) {
  const Flow& f = flows_[flow_index];
  dsr_.originate_data(f.src, f.dst, static_cast<std::uint32_t>(flow_index), seq);
  const SimTime next = f.start + f.gap() * static_cast<std::int64_t>(seq + 1);
  if (next <= f.stop && next <= SimTime::from_seconds(trace_.duration()))
    sched_.schedule(next, [this, flow_index, seq] { emit(flow_index, seq + 1); });
}

void Simulation::originate_at(SimTime at, NodeId src, NodeId dst) {
  sched_.schedule(at, [this, src, dst] { dsr_.originate_data(src, dst); });
}

const MetricsLedger& Simulation::run() {
  if (finished_) return ledger_;
  sched_.run_until(SimTime::from_seconds(trace_.duration()));
  dsr_.account_simulation_end();
  finished_ = true;
  return ledger_;
}

}  // namespace manet
