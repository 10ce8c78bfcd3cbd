#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qig/graph.hpp"

namespace qig {

// A vertex map between two spaces, materialized explicitly on finite balls:
// `forward` covers (at least) a ball around the source basepoint, `inverse`
// a ball around I the target basepoint.  `outer_radius` is the materialization
// budget the builder worked to; `inner_radius` is the certified radius: the
// largest r <= outer_radius such that
//   * forward is defined on all of ball(source, r),
//   * inverse is defined on all of ball(target, r), and
//   * the two are mutually inverse there
// (for `section_only` maps the last condition is one-sided; see below).
//
// Maps are honest records: builders write down what they did, `certify`
// measures how far out it actually works.
struct VertexMap {
  LocalGraph source;
  LocalGraph target;
  std::map<Addr, Addr> forward;
  std::map<Addr, Addr> inverse;

  int outer_radius = 0;
  int inner_radius = -1;

  // True for bounded-fiber surjections recorded together with a section:
  // `forward` may merge vertices and `inverse` picks one preimage per target
  // vertex.  Certification then checks forward totality, inverse totality,
  // and forward(inverse(w)) == w, but not inverse(forward(u)) == u.
  bool section_only = false;

  // Largest target-distance between images of adjacent source vertices inside
  // the certified ball, and the mirror bound for the inverse.  -1 means "not
  // measured" (the builder had no affordable way to compute distances there).
  std::int64_t forward_edge_bound = -1;
  std::int64_t inverse_edge_bound = -1;

  // Human-readable trail of the operations that built this map.
  std::vector<std::string> provenance;

  // Lookup with a structured error instead of std::out_of_range.
  const Addr& apply(const Addr& v) const;
  const Addr& pull(const Addr& w) const;
};

// Identity on addresses, materialized on ball(source, outer_radius) /
// ball(target, outer_radius).  `target` may be a rewired twin of `source`
// sharing its address space.
VertexMap identity_map(const LocalGraph& source, const LocalGraph& target, int outer_radius,
                       const std::string& provenance);

// Measures inner_radius and the adjacent-image distance bounds.  Edge bounds
// use exact metrics when both spaces carry one, capped BFS when the balls are
// small, and are left unmeasured (-1) otherwise.  The two-ball overload
// reuses pre-materialized balls of radius outer_radius around the source and
// target basepoints.
void certify(VertexMap& m);
void certify(VertexMap& m, const FiniteBall& src, const FiniteBall& tgt);

// g after f.  f.target and g.source must share one address space (the caller
// guarantees this; typically g.source is f.target or a rewired twin of it).
VertexMap compose(const VertexMap& f, const VertexMap& g);

// Swaps directions.  Rejects section_only maps (their forward is not
// injective, so there is nothing to invert).
VertexMap inverse_of(const VertexMap& m);

}  // namespace qig
