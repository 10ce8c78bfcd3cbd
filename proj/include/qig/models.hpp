#pragma once

#include "qig/graph.hpp"
#include "qig/group_spec.hpp"

namespace qig {

// Tree-of-spaces model of an amalgam A *_F B over a finite edge group: one
// Cayley copy of a side group per vertex of the underlying tree (sides
// alternate), and an |F|-edge bundle per tree edge matching k*phiA(f) on the
// parent side with phiB(f) on the child side. Two root copies A@- and B@-
// share the identity bundle. Addresses follow the copy-path grammar with
// non-trivial left-coset representatives as child tokens, e.g. "A@-/B@1#2".
//
// Carries an exact metric when no bundle offers a shortcut between the doors
// of another (checked at build time), and a geodesic descent ray when one can
// be verified.
LocalGraph amalgam_model(const GroupSpec& spec);

// Tree-of-spaces model of an HNN extension of A over a finite edge group with
// embeddings e1 (outgoing) and e2 (incoming): one Cayley copy of A per tree
// vertex. Every vertex has exactly two cross edges, one in an outgoing bundle
// (k*e1(f) downward to e2(f)) and one in an incoming bundle (k*e2(f) downward
// to e1(f)); a copy's identity bundle opposite to its arrival direction leads
// back up. Child tokens name the coset representative and direction, e.g.
// "A@-/O@0/I@1#2".
LocalGraph hnn_model(const GroupSpec& spec);

}  // namespace qig
