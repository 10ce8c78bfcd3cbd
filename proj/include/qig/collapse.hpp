#pragma once

#include <string>
#include <vector>

#include "qig/graph.hpp"
#include "qig/group_spec.hpp"
#include "qig/groups.hpp"
#include "qig/vertex_map.hpp"

namespace qig {

// Finite graph with one vertex per coset of a partition, named after a chosen
// element of that coset (`picks[k]` = element index standing for coset k).
// Two vertices are joined when any Cayley edge of the group joins their
// cosets; self-loops are dropped. Basepoint is the identity coset's pick.
// Carries a table-backed exact metric.
LocalGraph transversal_graph(const FiniteTableData& g, const CosetPartition& part,
                             const std::vector<int>& picks, const std::string& name);

// Infinite tree of copies of one finite connected base graph, in which every
// vertex of every copy carries exactly one outgoing and one incoming cross
// edge. Copies hang below every vertex in both directions ('O' outgoing, 'I'
// incoming, token = the vertex the copy hangs under), each new copy attached
// at the base graph's basepoint, whose opposite-direction edge leads back up.
// Addresses follow the copy-path grammar rooted at "A@-", e.g. "A@-/O@1#0".
// Carries an exact climb metric and a bi-infinite geodesic ray.
LocalGraph hnn_tree_space(const LocalGraph& base);

// Collapse of an amalgam model onto the free product of its two coset
// transversal graphs: every Cayley copy is crushed to one vertex per coset of
// the edge subgroup, and cross-edge bundles become single attaching edges.
// The forward half is the (surjective) collapse; the recorded inverse is the
// coset-representative section, so the map is stored section-only. Rejected
// when the edge subgroup has index 2 on both sides (the model is a two-ended
// chain and the target construction degenerates).
VertexMap amalgam_to_free_map(const GroupSpec& spec, int outer_radius);

// Collapse of an HNN model onto the chain tree over its simultaneous
// transversal graph: both coset partitions are represented by one element
// set (hnn_transversal), copies collapse to that transversal graph, and the
// two bundle families become the chain tree's outgoing/incoming edges.
// Rejected when the edge subgroup is the whole base group (no collapse
// direction). Bijective when the edge subgroup is trivial; section-only
// otherwise.
VertexMap hnn_to_free_map(const GroupSpec& spec, int outer_radius);

}  // namespace qig
