#pragma once

#include <cstddef>
#include <map>
#include <optional>

#include "manet/packet.hpp"
#include "manet/types.hpp"

namespace manet {

/// How the candidate reply length H_r is measured.
enum class ReplyLengthMode {
  kFull,        // accumulated RREQ prefix + cached suffix (source-to-destination hops)
  kSuffixOnly,  // cached suffix only
};

/// Query state carried implicitly by a route reply.
struct QueryState {
  NodeId source = 0;
  std::uint32_t id = 0;
  std::size_t returned_hops = 0;  // H_s
};

/// Reads (S, ID, H_s) out of a reply: S is the head of the returned route,
/// H_s its hop length. Throws std::invalid_argument on an empty route.
QueryState extract_query_state(const Rrep& rrep);

struct SuppressionRecord {
  NodeId rreq_source = 0;
  std::uint32_t rreq_id = 0;
  std::size_t best_overheard_len = 0;
  SimTime recorded_time{};
};

enum class OverhearOutcome { kRecorded, kIgnored };
enum class RreqVerdict { kPassThrough, kReply, kSuppressDiscard };

struct RreqDecision {
  RreqVerdict verdict = RreqVerdict::kPassThrough;
  std::size_t recorded_hops = 0;  // H_s of the consulted record
};

/// Per-node table of query state learned from overheard replies.
///
/// A reply for a request this node has not seen yet leaves a record; when
/// that request later arrives in its flooding phase the node answers only
/// with a strictly shorter route and otherwise consumes the request
/// silently. Records expire `ttl` after they were last lowered.
class SuppressionTable {
 public:
  explicit SuppressionTable(SimTime ttl = SimTime::from_seconds(10.0)) : ttl_(ttl) {}

  /// `rreq_seen` tells whether (S, ID) is already in the node's duplicate
  /// table. Gratuitous replies never create records.
  OverhearOutcome on_overhear_rrep(const Rrep& rrep, bool rreq_seen, SimTime now);

  /// Live record for `key`, if any.
  const SuppressionRecord* find(RreqKey key, SimTime now) const;

  /// `candidate_hops` is H_r for the best loop-free reply this node could
  /// build, or nullopt when it has none. Ring Zero requests always pass.
  RreqDecision on_rreq(const Rreq& rreq, std::optional<std::size_t> candidate_hops, SimTime now) const;

  std::size_t size() const { return records_.size(); }
  void prune(SimTime now);

 private:
  SimTime ttl_;
  std::map<RreqKey, SuppressionRecord> records_;
};

/// H_r for a reply built by appending `self` to `accumulated` and then the
/// cached suffix of `suffix_hops` hops.
std::size_t candidate_reply_hops(const Route& accumulated, std::size_t suffix_hops, ReplyLengthMode mode);

}  // namespace manet
