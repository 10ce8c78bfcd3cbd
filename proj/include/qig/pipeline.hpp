#pragma once

#include "qig/graph.hpp"
#include "qig/vertex_map.hpp"

namespace qig {

// Transports a bijective vertex comparison f : A -> B across a common free
// factor: the result compares free_product(A, C) with free_product(B, C).
//
// The construction reroutes every cross edge of the source to a separated net
// on the moving factor, consolidates the hanging copies at the net points,
// carries the whole bundle along f fiber-by-fiber (each net fiber's vertices
// are matched with their images in address order; the basepoint fiber is a
// singleton, so basepoints correspond), and expands the consolidated copies
// back on the far side.  The composite of those steps is applied here in its
// closed form: an address rewrite substituting the fiber transport on every
// moving-factor coordinate.
//
// Requirements (HypothesisError when violated): f is bijective (not
// section-only) between infinite spaces and certified to radius at least
// outer_radius + 4*net_separation + 2; C is presented as a free product of
// two infinite spaces (pre-compose with the staged product comparison to put
// a plain space in that form); when f moves the basepoint, B must carry
// homogeneity data so the comparison can be re-based first.
VertexMap qi_free_product_map(const VertexMap& f, const LocalGraph& c, int outer_radius,
                              int net_separation = 2);

}  // namespace qig
