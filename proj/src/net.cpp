#include "qig/net.hpp"

#include <algorithm>

#include "qig/errors.hpp"

namespace qig {

std::map<Addr, std::vector<Addr>> Net::fibers() const {
  std::map<Addr, std::vector<Addr>> out;
  for (const auto& [v, m] : projection) out[m].push_back(v);
  for (auto& [m, vs] : out) std::sort(vs.begin(), vs.end());
  return out;
}

Net greedy_net(const LocalGraph& space, const FiniteBall& b, int r) {
  if (r < 0) throw SpecError("greedy_net: negative separation");
  if (!b.contains(space.basepoint))
    throw SpecError("greedy_net: ball does not contain the basepoint");

  DistanceEngine eng(space, r);
  Net net;
  net.separation = r;
  net.members.push_back(space.basepoint);
  for (const auto& v : b.vertices) {
    if (v == space.basepoint) continue;
    bool separated = true;
    for (const auto& m : net.members) {
      if (eng.dist(v, m) <= r) {
        separated = false;
        break;
      }
    }
    if (separated) net.members.push_back(v);
  }

  const Addr& bp = space.basepoint;
  for (const auto& v : b.vertices) {
    if (v == bp) {
      net.projection[v] = bp;
      continue;
    }
    Addr chosen;
    bool found = false;
    for (const auto& m : net.members) {
      if (eng.dist(v, m) <= r) {
        chosen = m;
        found = true;
        break;
      }
    }
    if (!found) throw InternalError("greedy_net: vertex \"" + v + "\" not covered");
    if (chosen == bp) {
      // Reassign to the nearest non-basepoint member; earliest-chosen on ties.
      std::int64_t best = r + 1;
      bool have = false;
      for (const auto& m : net.members) {
        if (m == bp) continue;
        std::int64_t d = eng.dist(v, m);
        if (d < best) {
          best = d;
          chosen = m;
          have = true;
        }
      }
      if (!have) {
        // Degenerate single-member net: everything projects to the basepoint.
        chosen = bp;
      }
    }
    net.projection[v] = chosen;
  }
  net.basepoint_unique = true;
  for (const auto& [v, m] : net.projection)
    if (m == bp && v != bp) net.basepoint_unique = false;
  return net;
}

}  // namespace qig
