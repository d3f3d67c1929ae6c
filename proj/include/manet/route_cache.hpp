#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "manet/types.hpp"

namespace manet {

/// Path cache owned by one node. Every stored path starts at the owner and
/// serves every node it contains as a destination (its prefix up to that
/// node). No capacity bound and no expiry; paths leave only through
/// purge_link.
class RouteCache {
 public:
  explicit RouteCache(NodeId owner) : owner_(owner) {}

  NodeId owner() const { return owner_; }

  /// Rejects paths that do not start at the owner, have no hop, or repeat a
  /// node. Re-inserting a known path refreshes its learned time.
  bool insert(const Route& path, SimTime learned);

  /// Fewest-hop path owner..dst; ties go to the most recently learned path.
  std::optional<Route> lookup(NodeId dst) const;
  /// Hop count of lookup(dst) without materialising the path.
  std::optional<std::size_t> lookup_hops(NodeId dst) const;

  /// Removes every path that uses the directed link from -> to.
  std::size_t purge_link(NodeId from, NodeId to);

  std::size_t size() const { return entries_.size(); }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& e : entries_) f(e.path, e.learned);
  }

 private:
  struct Entry {
    Route path;
    SimTime learned;
  };
  struct Best {
    std::size_t entry;
    std::size_t hops;
  };
  std::optional<Best> find_best(NodeId dst) const;

  NodeId owner_;
  std::vector<Entry> entries_;
};

}  // namespace manet
