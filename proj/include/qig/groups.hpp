#pragma once

#include <memory>

#include "qig/group_spec.hpp"
#include "qig/graph.hpp"

namespace qig {

// Cayley graph of a supported group spec. Vertices are canonical normal
// forms; neighbors(v) = {v*s : s in the generating set}; basepoint is the
// identity. Carries exact metric (where closed-form or table-backed), group
// ops, homogeneity (left translation), and — for infinite groups — a
// canonical geodesic ray.
LocalGraph cayley(const GroupSpec& spec);

// The space's deterministic geodesic ray. Throws HypothesisError when the
// space is finite (or carries no ray), naming the space.
std::shared_ptr<const RayOracle> canonical_ray(const LocalGraph& space);

// Left-coset partition {g·im(F)} of a finite table by an embedded subgroup.
// cosets[k] = sorted member indices; coset_of[e] = k; rep_of[k] = the coset's
// representative (address-least member, except the identity coset, whose
// representative is the identity).
struct CosetPartition {
  std::vector<std::vector<int>> cosets;
  std::vector<int> coset_of;
  std::vector<int> rep_of;
  int identity_coset = -1;
};

CosetPartition left_cosets(const FiniteTableData& g, const Embedding& f_embed);

}  // namespace qig
