#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qig/graph.hpp"
#include "qig/vertex_map.hpp"

namespace qig {

// A finite, explicit edge rewiring of a space.
struct RewirePlan {
  std::vector<std::pair<Addr, Addr>> deletions;
  std::vector<std::pair<Addr, Addr>> insertions;
  bool empty() const { return deletions.empty() && insertions.empty(); }
};

// Applies a plan literally: the patched oracle serves the base neighbor list
// minus deleted edges plus inserted ones, with the original addresses as
// stable vertex ids.  Keeps the base labels (edge moves do not re-assign
// copies) but drops the exact metric, translation moves, and ray, all of
// which the rewiring invalidates.  Validates lazily per queried vertex:
// deleting an absent edge or inserting a present one throws HypothesisError.
LocalGraph patch_edges(const LocalGraph& base, const RewirePlan& plan,
                       const std::string& name_suffix);

// Restriction to the vertices where `keep` holds; neighbor lists are filtered
// the same way.  The caller is responsible for `keep` only ever cutting
// degree-one fringe (otherwise distances silently change shape).
LocalGraph drop_vertices(const LocalGraph& base, std::function<bool(const Addr&)> keep,
                         const std::string& name_suffix);

struct DecompositionReport {
  bool ok = true;
  std::string diagnostic;  // names the violated condition when !ok
};

// Checks that `z` (with its TreeLabels) looks like a tree of spaces on the
// materialized ball: every vertex inside radius-1 lies on exactly one cross
// edge, the cross flag agrees with the copy labels on every edge, cross edges
// join copies of opposite sides, and the copy-adjacency quotient is acyclic
// with no doubled edges ("quotient not a tree").
DecompositionReport check_tree_decomposition(const LocalGraph& z, const FiniteBall& b);

// The far endpoints of the edges to slide at ray vertex p(i), i >= 1.
using EdgeSelector = std::function<std::vector<Addr>(const Addr& p_i, std::int64_t i)>;

struct SlideResult {
  RewirePlan plan;
  LocalGraph space;  // rewired space; == input space when the plan is empty
  VertexMap map;     // identity on addresses, certified input -> output
};

// Slides edges one step toward the basepoint along a geodesic ray: for each
// i >= 1 with ray(i) inside the working ball, the selected edge
// (ray(i), far_i) is deleted and (ray(i-1), far_i) inserted.  The selector
// must pick exactly one edge at every ray vertex in scope, or none anywhere
// (then the result is the identity); a mix or an ambiguity is an error.
SlideResult slide_edges(const LocalGraph& space, std::function<Addr(std::int64_t)> ray,
                        const EdgeSelector& selector, int outer_radius);

// Comparison of an infinite space with its one-pendant extension: the
// basepoint moves to the pendant and the ray shifts one step toward the
// basepoint; everything off the ray stays put.
VertexMap plus_map(const LocalGraph& x, int outer_radius);

// Identifies a copy with its factor: given a vertex of the copy and the
// copy's anchor (the endpoint of its incoming cross edge), returns the
// corresponding factor address.  The anchor of a root copy is the designated
// edge's endpoint in that copy.
using CopyIdent = std::function<Addr(const Addr& vertex, const Addr& anchor)>;

// Reads a tree-of-spaces structure off `z` via its TreeLabels and rebuilds
// the identification with free_product_space(x, y), walking copy by copy
// outward from the designated cross edge (first endpoint = the copy matching
// x, second = the copy matching y).  Throws HypothesisError, naming the
// violated condition, when the structure does not hold.  Omitted idents
// default to leaf identity for copies anchored at the factor basepoint and to
// the factor's translations otherwise.  `prebuilt` may pass an existing
// ball(z, z.basepoint, outer_radius) to avoid re-materializing it.
VertexMap invariance_map(const LocalGraph& z, const std::pair<Addr, Addr>& designated_edge,
                         const LocalGraph& x, const LocalGraph& y, int outer_radius,
                         CopyIdent ident_x = nullptr, CopyIdent ident_y = nullptr,
                         const FiniteBall* prebuilt = nullptr);

// Splits free_product_space(x, y) at its base edge into two half trees,
// slides each half's dangling child copies one ray step toward the cut, and
// identifies both halves with the full product again; the result lands in
// wedge(P, P) where P = free_product_space(x, y).  Requires both factors
// infinite with rays.
VertexMap wedge_split_map(const LocalGraph& x, const LocalGraph& y, int outer_radius);

}  // namespace qig
