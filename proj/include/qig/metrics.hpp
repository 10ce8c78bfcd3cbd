#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "qig/graph.hpp"
#include "qig/vertex_map.hpp"

namespace qig {

using Rational = boost::rational<std::int64_t>;

// Exhaustive two-sided distance comparison over a certified map.
//
// Three fits are reported, all exact:
//   * l_corner — least L with d(fu,fv) <= L*d(u,v) and d(u,v) <= L*d(fu,fv)
//     throughout (C = 0): the worst two-sided ratio.
//   * c_corner — least integer C with |d(fu,fv) - d(u,v)| <= C (L = 1): the
//     worst additive gap.
//   * (l_mult, c_add) — the headline joint fit: among all L for which some
//     constraint is tight (every p/q with p,q up to the largest measured
//     distance), the pair (L, ceil of the worst residual) minimizing L + C,
//     ties broken toward the smaller L. Additive parts are kept integral.
//
// Bijective maps are measured over the certified source ball. Section-only
// records are measured over the recorded section (target ball pulled back),
// and `section_half` says so. Non-injective forward data on a map that does
// not declare a section is rejected with a witness pair.
struct DistortionReport {
  Rational l_mult{1};
  std::int64_t c_add = 0;
  Rational l_corner{1};
  std::int64_t c_corner = 0;
  int inner_radius = 0;
  int outer_radius = 0;
  std::array<Addr, 2> witness_ratio;     // source pair behind l_corner
  std::array<Addr, 2> witness_additive;  // source pair behind c_corner
  bool section_half = false;
};

DistortionReport distortion(const VertexMap& m);

// Coarse end-count probe: for each R up to r_max, the number of connected
// components of the annulus {R <= d <= 2R} that touch the outer sphere
// d == 2R. The classification reads the whole profile:
//   "zero"  — some annulus has no outer-sphere component (the space ran out),
//   "one" / "two" — the count is constantly 1 / 2,
//   "many"  — the count strictly grows over the last three radii,
//   "inconclusive" — anything else at this horizon.
struct EndsEstimate {
  std::vector<std::pair<int, std::int64_t>> counts;  // (R, component count)
  std::string classification;
};

EndsEstimate ends_estimate(const LocalGraph& space, int r_max);

// Reads off where a map's image sits inside a tree-of-spaces model. Every
// bundle separating the scope ball into two sides gets an orientation (does
// the image sit on the child side or the parent side?); the majority walk
// follows +1 orientations downward from the root copy.
//
//   located_copy — the copy where the walk stops ("" when a tie leaves the
//     image undecided between two copies);
//   r_emp — empirical Hausdorff radius: how far image vertices stray from the
//     located copy (-1 when nothing was located);
//   bundles — orientation table for every bundle with image weight on its
//     child side;
//   contradiction — non-empty when the walk descends into a copy that only
//     touches the scope boundary, i.e. the data points past the horizon.
struct LocalizationReport {
  Addr located_copy;
  std::int64_t r_emp = -1;
  struct BundleOrientation {
    std::string parent_copy;
    std::string child_copy;
    std::int64_t inside = 0;   // image vertices on the child side
    std::int64_t outside = 0;  // image vertices on the parent side
    int direction = 0;         // +1 child, -1 parent, 0 tie
  };
  std::vector<BundleOrientation> bundles;
  std::string contradiction;
};

LocalizationReport localize_vertex_space(const VertexMap& f, const LocalGraph& model);

}  // namespace qig
