#include "qig/vertex_map.hpp"

#include <algorithm>

#include "qig/errors.hpp"

namespace qig {

const Addr& VertexMap::apply(const Addr& v) const {
  auto it = forward.find(v);
  if (it == forward.end()) {
    throw InternalError("vertex map: forward lookup outside materialized scope: " + v);
  }
  return it->second;
}

const Addr& VertexMap::pull(const Addr& w) const {
  auto it = inverse.find(w);
  if (it == inverse.end()) {
    throw InternalError("vertex map: inverse lookup outside materialized scope: " + w);
  }
  return it->second;
}

VertexMap identity_map(const LocalGraph& source, const LocalGraph& target, int outer_radius,
                       const std::string& provenance) {
  VertexMap m;
  m.source = source;
  m.target = target;
  m.outer_radius = outer_radius;
  m.provenance.push_back(provenance);
  // Both directions over both balls: rewiring can pull vertices into the
  // target ball that the source ball misses, and vice versa.
  const FiniteBall src = ball(source, source.basepoint, outer_radius);
  const FiniteBall tgt = ball(target, target.basepoint, outer_radius);
  for (const Addr& v : src.vertices) {
    m.forward[v] = v;
    m.inverse[v] = v;
  }
  for (const Addr& w : tgt.vertices) {
    m.forward[w] = w;
    m.inverse[w] = w;
  }
  certify(m, src, tgt);
  return m;
}

namespace {

// Balls beyond this size skip BFS-based edge-bound measurement (no exact
// metric, quadratic blowup); certification still measures the radius.
constexpr std::size_t kBfsBoundBallLimit = 4000;

std::int64_t measure_edge_bound(const std::map<Addr, Addr>& entries, const FiniteBall& domain,
                                int inner, const LocalGraph& codomain, int outer) {
  if (inner < 1) return 0;
  std::vector<std::pair<Addr, Addr>> pairs;
  for (const auto& [a, b] : domain.edges) {
    if (domain.dist.at(a) > inner || domain.dist.at(b) > inner) continue;
    auto ia = entries.find(a);
    auto ib = entries.find(b);
    if (ia == entries.end() || ib == entries.end()) continue;
    pairs.emplace_back(ia->second, ib->second);
  }
  if (pairs.empty()) return 0;
  if (codomain.metric) {
    std::int64_t best = 0;
    for (const auto& [fa, fb] : pairs) best = std::max(best, codomain.metric->dist(fa, fb));
    return best;
  }
  if (domain.vertices.size() > kBfsBoundBallLimit) return -1;
  // Per-pair BFS with early stop; results saturate at cap+1.  Honest maps
  // move edge endpoints a handful of steps apart, so each probe is tiny.
  const std::int64_t cap = std::min<std::int64_t>(outer, 8);
  std::int64_t best = 0;
  for (const auto& [fa, fb] : pairs) {
    auto d = distance(codomain, fa, fb, cap);
    best = std::max(best, d ? *d : cap + 1);
  }
  return best;
}

}  // namespace

void certify(VertexMap& m) {
  const FiniteBall src = ball(m.source, m.source.basepoint, m.outer_radius);
  const FiniteBall tgt = ball(m.target, m.target.basepoint, m.outer_radius);
  certify(m, src, tgt);
}

void certify(VertexMap& m, const FiniteBall& src, const FiniteBall& tgt) {
  int src_fail = m.outer_radius + 1;
  for (const Addr& u : src.vertices) {
    bool ok = false;
    auto it = m.forward.find(u);
    if (it != m.forward.end()) {
      if (m.section_only) {
        ok = true;
      } else {
        auto back = m.inverse.find(it->second);
        ok = back != m.inverse.end() && back->second == u;
      }
    }
    if (!ok) src_fail = std::min(src_fail, src.dist.at(u));
  }

  int tgt_fail = m.outer_radius + 1;
  for (const Addr& w : tgt.vertices) {
    bool ok = false;
    auto it = m.inverse.find(w);
    if (it != m.inverse.end()) {
      auto fwd = m.forward.find(it->second);
      ok = fwd != m.forward.end() && fwd->second == w;
    }
    if (!ok) tgt_fail = std::min(tgt_fail, tgt.dist.at(w));
  }

  m.inner_radius = std::min({m.outer_radius, src_fail - 1, tgt_fail - 1});
  m.forward_edge_bound =
      measure_edge_bound(m.forward, src, m.inner_radius, m.target, m.outer_radius);
  m.inverse_edge_bound =
      measure_edge_bound(m.inverse, tgt, m.inner_radius, m.source, m.outer_radius);
}

VertexMap compose(const VertexMap& f, const VertexMap& g) {
  VertexMap h;
  h.source = f.source;
  h.target = g.target;
  h.outer_radius = std::min(f.outer_radius, g.outer_radius);
  h.section_only = f.section_only || g.section_only;
  for (const auto& [u, mid] : f.forward) {
    auto it = g.forward.find(mid);
    if (it != g.forward.end()) h.forward[u] = it->second;
  }
  for (const auto& [w, mid] : g.inverse) {
    auto it = f.inverse.find(mid);
    if (it != f.inverse.end()) h.inverse[w] = it->second;
  }
  h.provenance = f.provenance;
  h.provenance.insert(h.provenance.end(), g.provenance.begin(), g.provenance.end());
  certify(h);
  return h;
}

VertexMap inverse_of(const VertexMap& m) {
  if (m.section_only) {
    throw HypothesisError("cannot invert a section-only map: its forward direction merges vertices");
  }
  VertexMap r;
  r.source = m.target;
  r.target = m.source;
  r.forward = m.inverse;
  r.inverse = m.forward;
  r.outer_radius = m.outer_radius;
  r.provenance = m.provenance;
  r.provenance.push_back("inverse");
  certify(r);
  return r;
}

}  // namespace qig
