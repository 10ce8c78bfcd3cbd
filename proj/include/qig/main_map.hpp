#pragma once

#include <string>
#include <vector>

#include "qig/graph.hpp"
#include "qig/vertex_map.hpp"

namespace qig {

// One rung of the staged comparison: a named rewiring step, the space it
// lands in, and the certified vertex map from the previous rung's space.
struct MainMapStage {
  std::string name;
  LocalGraph space;  // target of `step`; source of the next stage's step
  VertexMap step;
};

// Result of main_map: the two product spaces being compared, the six
// intermediate steps (so callers can inspect or re-certify any rung), and the
// end-to-end certified map.
struct MainMapResult {
  LocalGraph source;                 // free_product_space(x, y)
  LocalGraph target;                 // free_product_space(x, free_product_space(y, y))
  std::vector<MainMapStage> stages;  // pendant lift, attach rewire, pendant
                                     // restrict, chain slide, branch slide, identify
  VertexMap map;                     // composite of the six steps, certified
};

// Builds a bijective bounded-distortion comparison between x*y and x*(y*y),
// for infinite factors carrying geodesic rays.  The construction rewires
// rather than recomputes: grow a pendant on the x factor and shift its ray
// one step to absorb it; re-route the pendant's child copy so it hangs off
// its grandparent y copy by a y--y edge; restrict away the now-redundant
// pendants; slide the y--y edges (and then the x-copy edges inside the
// re-routed copies) one step toward each copy's basepoint so every y copy
// gains the missing child slot; finally read the resulting blocks of y copies
// off as copies of y*y and certify the identification against x*(y*y).
//
// Every returned stage map and the composite are certified empirically;
// `outer_radius` is the radius the composite is materialized and measured at.
// Throws HypothesisError when a factor is finite or lacks a ray, or when an
// intermediate space fails the structural checks its stage relies on.
MainMapResult main_map(const LocalGraph& x, const LocalGraph& y, int outer_radius);

}  // namespace qig
