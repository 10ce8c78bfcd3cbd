#pragma once

#include <vector>

#include "qig/group_spec.hpp"
#include "qig/groups.hpp"

namespace qig {

// A simultaneous system of coset representatives: one set of group elements
// meeting every coset of two partitions exactly once each.
//
// `members` lists the chosen element indices sorted by element name; `pick1[k]`
// and `pick2[k]` give the member lying in coset k of the first and second
// partition, so both are bijections from cosets to members.
struct Transversal {
  std::vector<int> members;
  std::vector<int> pick1;
  std::vector<int> pick2;
};

// Canonical simultaneous transversal for two left-coset partitions of one
// finite group.
//
// Both partitions must consist of cosets of one shared size (SpecError
// otherwise).  Under that regularity a perfect matching between the two coset
// families always exists — the bipartite incidence multigraph (one edge per
// group element) is regular — and a matching still exists after forcing the
// identity element's edge, so the returned transversal always contains the
// identity and the induced collapse maps can stay based.  Among all valid
// identity-containing transversals the one whose sorted name list is
// lexicographically least is returned; the minimum is found independently on
// each connected component of the incidence graph, which is equivalent to the
// global minimum because components partition the element set.
Transversal hnn_transversal(const FiniteTableData& g, const CosetPartition& p1,
                            const CosetPartition& p2);

}  // namespace qig
