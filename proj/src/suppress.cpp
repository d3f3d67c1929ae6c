#include "manet/suppress.hpp"

#include <stdexcept>

namespace manet {

QueryState extract_query_state(const Rrep& rrep) {
  if (rrep.returned_route.empty()) throw std::invalid_argument("malformed RREP: empty returned route");
  return QueryState{rrep.returned_route.front(), rrep.for_rreq.id, rrep.returned_route.size() - 1};
}

OverhearOutcome SuppressionTable::on_overhear_rrep(const Rrep& rrep, bool rreq_seen, SimTime now) {
  if (rrep.gratuitous || rreq_seen) return OverhearOutcome::kIgnored;
  const QueryState q = extract_query_state(rrep);
  if (q.returned_hops == 0) return OverhearOutcome::kIgnored;
  const RreqKey key{q.source, q.id};
  auto it = records_.find(key);
  if (it != records_.end() && now - it->second.recorded_time <= ttl_) {
    if (q.returned_hops < it->second.best_overheard_len) {
      it->second.best_overheard_len = q.returned_hops;
      it->second.recorded_time = now;
    }
    return OverhearOutcome::kRecorded;
  }
  records_[key] = SuppressionRecord{q.source, q.id, q.returned_hops, now};
  return OverhearOutcome::kRecorded;
}

const SuppressionRecord* SuppressionTable::find(RreqKey key, SimTime now) const {
  auto it = records_.find(key);
  if (it == records_.end() || now - it->second.recorded_time > ttl_) return nullptr;
  return &it->second;
}

RreqDecision SuppressionTable::on_rreq(const Rreq& rreq, std::optional<std::size_t> candidate_hops,
                                       SimTime now) const {
  if (!rreq.propagating) return {};
  const SuppressionRecord* rec = find(rreq.key(), now);
  if (!rec) return {};
  if (candidate_hops && *candidate_hops < rec->best_overheard_len)
    return {RreqVerdict::kReply, rec->best_overheard_len};
  return {RreqVerdict::kSuppressDiscard, rec->best_overheard_len};
}

void SuppressionTable::prune(SimTime now) {
  std::erase_if(records_, [&](const auto& kv) { return now - kv.second.recorded_time > ttl_; });
}

std::size_t candidate_reply_hops(const Route& accumulated, std::size_t suffix_hops, ReplyLengthMode mode) {
  // accumulated = [S .. previous hop]; appending self adds accumulated.size() hops.
  return mode == ReplyLengthMode::kFull ? accumulated.size() + suffix_hops : suffix_hops;
}

}  // namespace manet
