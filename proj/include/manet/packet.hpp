#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "manet/types.hpp"

namespace manet {

/// Hop-by-hop delivery path for unicast packets: `path[cursor]` currently holds the packet.
struct Hops {
  Route path;
  std::size_t cursor = 0;

  NodeId holder() const { return path[cursor]; }
  NodeId next() const { return path[cursor + 1]; }
  bool at_end() const { return cursor + 1 >= path.size(); }
};

struct Rreq {
  NodeId source = 0;
  NodeId target = 0;
  std::uint32_t id = 0;
  Route accumulated;  // starts at source
  std::uint32_t hop_limit = 0;
  bool propagating = false;  // false for the Ring Zero phase

  RreqKey key() const { return {source, id}; }
};

enum class RrepClass { kCached, kTarget, kGratuitous };

struct Rrep {
  Route returned_route;  // source .. target
  NodeId replying_node = 0;
  RreqKey for_rreq;
  bool gratuitous = false;
  RrepClass kind = RrepClass::kCached;  // fixed at origination
  Hops hops;                            // replying node back to the source
};

struct Rerr {
  NodeId broken_from = 0;
  NodeId broken_to = 0;
  NodeId notify = 0;  // original source of the data packet
  Hops hops;
};

struct Data {
  Hops hops;  // hops.path is the source route
  std::uint32_t ttl = 64;
  std::uint64_t uid = 0;
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  SimTime origination{};
  std::uint32_t hops_taken = 0;
  std::uint32_t salvage_count = 0;

  NodeId source() const { return hops.path.front(); }
  NodeId destination() const { return hops.path.back(); }
};

using Packet = std::variant<Rreq, Rrep, Rerr, Data>;

inline bool is_control(const Packet& p) { return !std::holds_alternative<Data>(p); }

/// Packet kinds as tallied in transmission counters.
enum class TxKind { kRreq, kCachedRrep, kTargetRrep, kGratuitousRrep, kRerr, kData };
inline constexpr std::size_t kTxKindCount = 6;

TxKind tx_kind(const Packet& p);
const char* tx_kind_name(TxKind k);

struct PacketSizes {
  std::size_t fixed_header = 12;
  std::size_t per_address = 4;
  std::size_t data_payload = 64;
};

/// Bytes on the air: fixed header + 4 bytes per route address (+ payload for DATA).
std::size_t packet_size(const Packet& p, const PacketSizes& sizes = {});

/// Short human-readable summary for event-log lines.
std::string describe(const Packet& p);

}  // namespace manet
