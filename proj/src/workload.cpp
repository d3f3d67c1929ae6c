#include "manet/workload.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/ostream.h>

#include "manet/engine.hpp"

namespace manet {

SimTime Flow::gap() const { return SimTime::from_ns(std::llround(1e9 / rate)); }

std::uint64_t Flow::packet_count() const {
  if (stop < start) return 0;
  return static_cast<std::uint64_t>((stop - start).ns() / gap().ns()) + 1;
}

std::vector<Flow> build_flows(const WorkloadParams& p, std::uint64_t seed) {
  if (p.n_nodes < 2) throw std::invalid_argument("workload: need at least two nodes");
  if (p.n_sources > p.n_nodes) throw std::invalid_argument("workload: more sources than nodes");
  if (!(p.rate > 0.0)) throw std::invalid_argument("workload: rate must be positive");

  RngStream rng(seed, "traffic");
  // Partial Fisher-Yates over node ids picks distinct sources.
  std::vector<NodeId> ids(p.n_nodes);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  std::vector<Flow> flows;
  flows.reserve(p.n_sources);
  for (std::size_t i = 0; i < p.n_sources; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(i, p.n_nodes - 1));
    std::swap(ids[i], ids[j]);
    const NodeId src = ids[i];
    auto dst = static_cast<NodeId>(rng.uniform_int(0, p.n_nodes - 2));
    if (dst >= src) ++dst;
    const SimTime start = SimTime::from_seconds(rng.uniform(0.0, p.stagger));
    flows.push_back(Flow{src, dst, p.rate, p.payload, start, SimTime::from_seconds(p.duration)});
  }
  return flows;
}

void write_flows_tsv(std::ostream& out, const std::vector<Flow>& flows) {
  for (const Flow& f : flows)
    fmt::print(out, "{}\t{}\t{}\t{}\t{}\n", f.src, f.dst, f.rate, f.start.str(), f.stop.str());
}

}  // namespace manet
