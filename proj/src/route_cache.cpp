#include "manet/route_cache.hpp"

#include <algorithm>

namespace manet {

bool RouteCache::insert(const Route& path, SimTime learned) {
  if (path.size() < 2 || path.front() != owner_ || !is_loop_free(path)) return false;
  for (auto& e : entries_) {
    if (e.path == path) {
      e.learned = std::max(e.learned, learned);
      return true;
    }
  }
  entries_.push_back(Entry{path, learned});
  return true;
}

std::optional<RouteCache::Best> RouteCache::find_best(NodeId dst) const {
  if (dst == owner_) return std::nullopt;
  std::optional<Best> best;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Route& p = entries_[i].path;
    const std::size_t limit = best ? std::min(p.size(), best->hops + 1) : p.size();
    for (std::size_t k = 1; k < limit; ++k) {
      if (p[k] != dst) continue;
      if (!best || k < best->hops || entries_[i].learned > entries_[best->entry].learned) best = Best{i, k};
      break;
    }
  }
  return best;
}

std::optional<Route> RouteCache::lookup(NodeId dst) const {
  const auto best = find_best(dst);
  if (!best) return std::nullopt;
  const Route& p = entries_[best->entry].path;
  return Route(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(best->hops + 1));
}

std::optional<std::size_t> RouteCache::lookup_hops(NodeId dst) const {
  const auto best = find_best(dst);
  if (!best) return std::nullopt;
  return best->hops;
}

std::size_t RouteCache::purge_link(NodeId from, NodeId to) {
  const auto uses_link = [&](const Entry& e) {
    for (std::size_t k = 0; k + 1 < e.path.size(); ++k)
      if (e.path[k] == from && e.path[k + 1] == to) return true;
    return false;
  };
  const auto before = entries_.size();
  entries_.erase(std::remove_if(entries_.begin(), entries_.end(), uses_link), entries_.end());
  return before - entries_.size();
}

}  // namespace manet
