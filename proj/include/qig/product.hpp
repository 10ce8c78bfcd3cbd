#pragma once

#include "qig/graph.hpp"

namespace qig {

// Address of the pendant vertex added by plus().
inline constexpr const char* kPendantAddr = "+";

// Based free product of two pointed spaces. The result is a tree of
// alternating copies: two root copies X@- and Y@- joined by a base edge
// between their basepoints, and a fresh copy of the other space hanging from
// every non-basepoint vertex (attached by an edge to the child's basepoint).
// Addresses follow the copy-path grammar, e.g. "X@-/Y@+1#0".
//
// Carries an exact metric when both factors do, tree labels always, and a
// geodesic ray whenever one exists (lifted from a factor, or an alternating
// descent when both factors are finite but non-trivial).
LocalGraph free_product_space(const LocalGraph& x, const LocalGraph& y);

// Disjoint union of X and Y plus a single joining edge between their
// basepoints. The wedge basepoint is the X-side endpoint ("X@-#x0"); crossing
// between the halves always traverses the joining edge, so cross distances
// are d_X(x, x0) + 1 + d_Y(y0, y).
LocalGraph wedge(const LocalGraph& x, const LocalGraph& y);

// X with one pendant vertex (address "+") attached to the basepoint by a
// single edge. The basepoint does not move.
LocalGraph plus(const LocalGraph& x);

}  // namespace qig
