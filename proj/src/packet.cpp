#include "manet/packet.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace manet {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

TxKind tx_kind(const Packet& p) {
  return std::visit(overloaded{[](const Rreq&) { return TxKind::kRreq; },
                               [](const Rrep& r) {
                                 switch (r.kind) {
                                   case RrepClass::kTarget: return TxKind::kTargetRrep;
                                   case RrepClass::kGratuitous: return TxKind::kGratuitousRrep;
                                   case RrepClass::kCached: break;
                                 }
                                 return TxKind::kCachedRrep;
                               },
                               [](const Rerr&) { return TxKind::kRerr; }, [](const Data&) { return TxKind::kData; }},
                    p);
}

const char* tx_kind_name(TxKind k) {
  switch (k) {
    case TxKind::kRreq: return "RREQ";
    case TxKind::kCachedRrep: return "CREP";
    case TxKind::kTargetRrep: return "TREP";
    case TxKind::kGratuitousRrep: return "GREP";
    case TxKind::kRerr: return "RERR";
    case TxKind::kData: return "DATA";
  }
  return "?";
}

std::size_t packet_size(const Packet& p, const PacketSizes& s) {
  return std::visit(overloaded{[&](const Rreq& q) { return s.fixed_header + s.per_address * q.accumulated.size(); },
                               [&](const Rrep& r) { return s.fixed_header + s.per_address * r.returned_route.size(); },
                               [&](const Rerr& e) { return s.fixed_header + s.per_address * e.hops.path.size(); },
                               [&](const Data& d) {
                                 return s.fixed_header + s.per_address * d.hops.path.size() + s.data_payload;
                               }},
                    p);
}

std::string describe(const Packet& p) {
  return std::visit(
      overloaded{[](const Rreq& q) {
                   return fmt::format("RREQ {}>{} id={} hl={} rz={} route={}", q.source, q.target, q.id, q.hop_limit,
                                      q.propagating ? 0 : 1, format_route(q.accumulated));
                 },
                 [](const Rrep& r) {
                   return fmt::format("{} {} id={} by={} route={}", tx_kind_name(tx_kind(Packet{r})), r.for_rreq.source,
                                      r.for_rreq.id, r.replying_node, format_route(r.returned_route));
                 },
                 [](const Rerr& e) {
                   return fmt::format("RERR {}>{} notify={}", e.broken_from, e.broken_to, e.notify);
                 },
                 [](const Data& d) {
                   return fmt::format("DATA uid={} flow={} route={} cur={}", d.uid, d.flow, format_route(d.hops.path),
                                      d.hops.cursor);
                 }},
      p);
}

}  // namespace manet
