#include "qig/graph.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <set>
#include <unordered_map>

#include "qig/errors.hpp"

namespace qig {

LocalGraph rebase(const LocalGraph& g, const Addr& new_basepoint) {
  LocalGraph out = g;
  out.basepoint = new_basepoint;
  out.ray.reset();
  out.moves.reset();
  out.name = g.name + "@" + new_basepoint;
  return out;
}

LocalGraph memoized(const LocalGraph& g) {
  struct Cache {
    std::mutex mu;
    std::unordered_map<Addr, std::vector<Addr>> table;
  };
  auto cache = std::make_shared<Cache>();
  auto base = g.neighbors;
  LocalGraph out = g;
  out.neighbors = [cache, base](const Addr& v) {
    {
      std::scoped_lock lock(cache->mu);
      auto it = cache->table.find(v);
      if (it != cache->table.end()) return it->second;
    }
    auto result = base(v);
    std::scoped_lock lock(cache->mu);
    return cache->table.emplace(v, std::move(result)).first->second;
  };
  return out;
}

namespace {

// Fetches neighbors and enforces the oracle contract.
std::vector<Addr> checked_neighbors(const LocalGraph& space, const Addr& v) {
  std::vector<Addr> ns = space.neighbors(v);
  if (space.valence_bound > 0 && ns.size() > static_cast<std::size_t>(space.valence_bound))
    throw MalformedSpaceError("valence bound " + std::to_string(space.valence_bound) +
                              " exceeded at \"" + v + "\" (" + std::to_string(ns.size()) + ")");
  std::set<Addr> seen;
  for (const auto& w : ns) {
    if (w == v) throw MalformedSpaceError("self-loop at \"" + v + "\"");
    if (!seen.insert(w).second)
      throw MalformedSpaceError("duplicate neighbor \"" + w + "\" at \"" + v + "\"");
  }
  return ns;
}

}  // namespace

FiniteBall ball(const LocalGraph& space, const Addr& center, int radius) {
  if (radius < 0) throw SpecError("ball: negative radius");
  FiniteBall b;
  b.center = center;
  b.radius = radius;

  b.vertices.push_back(center);
  b.dist[center] = 0;
  std::map<Addr, std::vector<Addr>> adj_of;  // neighbor lists of ball members

  std::vector<Addr> layer = {center};
  for (int d = 0; d < radius && !layer.empty(); ++d) {
    std::set<Addr> next;
    for (const auto& u : layer) {
      auto ns = checked_neighbors(space, u);
      for (const auto& w : ns)
        if (!b.dist.count(w)) next.insert(w);
      adj_of.emplace(u, std::move(ns));
    }
    layer.assign(next.begin(), next.end());  // address order within the layer
    for (const auto& w : layer) {
      b.dist[w] = d + 1;
      b.vertices.push_back(w);
    }
  }
  // Neighbor lists of the outermost layer: needed for edge collection and to
  // validate symmetry at the boundary.
  for (const auto& u : layer) adj_of.emplace(u, checked_neighbors(space, u));

  std::set<std::pair<Addr, Addr>> edges;
  for (const auto& [u, ns] : adj_of) {
    for (const auto& w : ns) {
      if (!b.dist.count(w)) continue;
      const auto& wn = adj_of.at(w);
      if (std::find(wn.begin(), wn.end(), u) == wn.end())
        throw MalformedSpaceError("asymmetric adjacency: \"" + u + "\" lists \"" + w +
                                  "\" but not conversely");
      edges.insert(u < w ? std::make_pair(u, w) : std::make_pair(w, u));
    }
  }
  b.edges.assign(edges.begin(), edges.end());
  for (std::size_t i = 0; i < b.vertices.size(); ++i) b.index[b.vertices[i]] = i;
  return b;
}

namespace {

std::optional<std::int64_t> bfs_distance(const LocalGraph& space, const Addr& u, const Addr& v,
                                         std::int64_t cap) {
  if (u == v) return 0;
  if (cap <= 0) return std::nullopt;
  std::map<Addr, std::int64_t> dist{{u, 0}};
  std::deque<Addr> q{u};
  while (!q.empty()) {
    Addr cur = q.front();
    q.pop_front();
    std::int64_t d = dist[cur] + 1;
    if (d > cap) break;
    for (const auto& w : checked_neighbors(space, cur)) {
      if (dist.count(w)) continue;
      if (w == v) return d;
      dist[w] = d;
      if (d < cap) q.push_back(w);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::int64_t> distance(const LocalGraph& space, const Addr& u, const Addr& v,
                                     std::int64_t cap) {
  if (cap < 0) throw SpecError("distance: negative cap");
  if (space.metric) {
    std::int64_t d = space.metric->dist(u, v);
    if (d <= cap) return d;
    return std::nullopt;
  }
  return bfs_distance(space, u, v, cap);
}

DistanceEngine::DistanceEngine(const LocalGraph& space, std::int64_t cap)
    : space_(space), cap_(cap) {}

std::int64_t DistanceEngine::dist(const Addr& u, const Addr& v) const {
  if (space_.metric) {
    std::int64_t d = space_.metric->dist(u, v);
    return d <= cap_ ? d : cap_ + 1;
  }
  if (u == v) return 0;
  auto& from_u = bfs_memo_[u];
  if (from_u.empty()) {
    // One capped BFS, memoized whole: all-pairs callers reuse it.
    from_u[u] = 0;
    std::deque<Addr> q{u};
    while (!q.empty()) {
      Addr cur = q.front();
      q.pop_front();
      std::int64_t d = from_u[cur] + 1;
      if (d > cap_) continue;
      for (const auto& w : space_.neighbors(cur))
        if (from_u.emplace(w, d).second && d < cap_) q.push_back(w);
    }
  }
  auto it = from_u.find(v);
  return it == from_u.end() ? cap_ + 1 : it->second;
}

}  // namespace qig
