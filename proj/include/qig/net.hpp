#pragma once

#include <map>
#include <vector>

#include "qig/graph.hpp"

namespace qig {

// A coarsely dense, r-separated subset of a ball with a projection sending
// every ball vertex to a member within r.
struct Net {
  int separation = 0;
  std::vector<Addr> members;          // in greedy (selection) order
  std::map<Addr, Addr> projection;    // ball vertex -> member
  // True when the basepoint is the unique preimage of itself. Always true for
  // nets with >= 2 members; a single-member net over a non-trivial ball cannot
  // satisfy it and is marked degenerate instead.
  bool basepoint_unique = false;

  // Vertices sharing a projection target, keyed by member, values address-sorted.
  std::map<Addr, std::vector<Addr>> fibers() const;
};

// Greedy net over `b`: walk vertices in ball order, keep those farther than r
// from every member so far, seeded with the space basepoint. Projection sends
// each vertex to the earliest-chosen member within r, except that non-members
// never project to the basepoint: those are reassigned to their nearest other
// member (earliest-chosen on ties). Distances are ambient (computed in
// `space`, not just inside the ball subgraph).
Net greedy_net(const LocalGraph& space, const FiniteBall& b, int r);

}  // namespace qig
