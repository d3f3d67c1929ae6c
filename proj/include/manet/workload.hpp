#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Constant-bit-rate flow. Packets leave at start, start + 1/rate, ... up to
/// and including stop.
struct Flow {
  NodeId src = 0;
  NodeId dst = 0;
  double rate = 2.0;  // packets per second
  std::size_t payload = 64;
  SimTime start{};
  SimTime stop{};

  SimTime gap() const;
  std::uint64_t packet_count() const;
};

struct WorkloadParams {
  std::size_t n_sources = 40;
  std::size_t n_nodes = 100;
  double rate = 2.0;
  std::size_t payload = 64;
  double duration = 500.0;
  double stagger = 10.0;  // start times uniform over [0, stagger)
};

/// Distinct sources chosen uniformly; each destination uniform over the
/// other nodes. Throws std::invalid_argument when n_sources > n_nodes.
std::vector<Flow> build_flows(const WorkloadParams& params, std::uint64_t seed);

/// `src<TAB>dst<TAB>rate<TAB>start<TAB>stop`, one line per flow.
void write_flows_tsv(std::ostream& out, const std::vector<Flow>& flows);

}  // namespace manet
