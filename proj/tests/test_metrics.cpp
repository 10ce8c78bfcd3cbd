#include <doctest.h>

#include <string>

#include <json.hpp>

#include "qig/errors.hpp"
#include "qig/graph.hpp"
#include "qig/group_spec.hpp"
#include "qig/metrics.hpp"
#include "qig/product.hpp"
#include "qig/rewire.hpp"
#include "qig/vertex_map.hpp"

using namespace qig;
using nlohmann::json;

namespace {

const char* kZ = R"({"kind":"free_abelian","rank":1})";
const char* kZ2 = R"({"kind":"free_abelian","rank":2})";
const char* kF2 = R"({"kind":"free","rank":2})";
const char* kZ3 = R"({"kind":"finite_table","names":["0","1","2"],"table":[[0,1,2],[1,2,0],[2,0,1]]})";
const char* kDihedral =
    R"({"kind":"free_product","factors":[
        {"kind":"finite_table","names":["0","1"],"table":[[0,1],[1,0]]},
        {"kind":"finite_table","names":["0","1"],"table":[[0,1],[1,0]]}]})";

LocalGraph space_of(const std::string& text) {
  return build_space(SpaceSpec::from_json(json::parse(text)));
}

// Embeds a factor ball into a free product model as its root copy.
VertexMap root_copy_map(const LocalGraph& factor, const LocalGraph& model, int radius) {
  VertexMap f;
  f.source = factor;
  f.target = model;
  f.outer_radius = radius;
  f.provenance.push_back("factor onto the root copy");
  FiniteBall b = ball(factor, factor.basepoint, radius);
  for (const Addr& u : b.vertices) {
    f.forward[u] = "X@-#" + u;
    f.inverse["X@-#" + u] = u;
  }
  return f;
}

}  // namespace

TEST_CASE("distortion of the identity is exactly (1, 0)") {
  LocalGraph z2 = space_of(kZ2);
  VertexMap m = identity_map(z2, z2, 6, "identity");
  DistortionReport rep = distortion(m);
  CHECK(rep.l_mult == Rational(1));
  CHECK(rep.c_add == 0);
  CHECK(rep.l_corner == Rational(1));
  CHECK(rep.c_corner == 0);
  CHECK(rep.inner_radius == 6);
  CHECK(!rep.section_half);
  // Witnesses name the pair behind each corner bound; for the identity any
  // measured pair realizes ratio 1 and gap 0.
  CHECK(!rep.witness_ratio[0].empty());
  CHECK(!rep.witness_additive[0].empty());
}

TEST_CASE("distortion of the pendant comparison on the line") {
  // The pendant extension moves the basepoint one step and shifts the ray:
  // distances change by at most 1, and pairs across the basepoint at source
  // distance 1 land at target distance 2.
  LocalGraph z = space_of(kZ);
  VertexMap m = plus_map(z, 8);
  REQUIRE(m.inner_radius == 8);

  DistortionReport rep = distortion(m);
  CHECK(rep.l_corner == Rational(2));
  CHECK(rep.c_corner == 1);
  CHECK(rep.l_mult == Rational(1));
  CHECK(rep.c_add == 1);
  CHECK(!rep.witness_ratio[0].empty());
  CHECK(!rep.witness_additive[0].empty());
}

TEST_CASE("distortion rejects dishonest records") {
  LocalGraph z = space_of(kZ);

  SUBCASE("uncertified map") {
    VertexMap m;
    m.source = z;
    m.target = z;
    m.forward["0"] = "0";
    CHECK_THROWS_WITH_AS(distortion(m), doctest::Contains("not been certified"), SpecError);
  }
  SUBCASE("merged forward data on a map claiming bijectivity") {
    VertexMap m;
    m.source = z;
    m.target = z;
    m.outer_radius = 1;
    m.inner_radius = 1;  // claimed, not measured: distortion must re-check
    m.forward["0"] = "0";
    m.forward["+1"] = "+1";
    m.forward["-1"] = "+1";
    m.inverse["0"] = "0";
    m.inverse["+1"] = "+1";
    m.inverse["-1"] = "-1";
    CHECK_THROWS_WITH_AS(distortion(m), doctest::Contains("share the image +1"), HypothesisError);
  }
}

TEST_CASE("ends_estimate separates the standard shapes") {
  SUBCASE("the plane has one end") {
    EndsEstimate est = ends_estimate(space_of(kZ2), 4);
    REQUIRE(est.counts.size() == 4);
    for (const auto& [r, n] : est.counts) {
      (void)r;
      CHECK(n == 1);
    }
    CHECK(est.classification == "one");
  }
  SUBCASE("the line has two ends") {
    EndsEstimate est = ends_estimate(space_of(kZ), 4);
    for (const auto& [r, n] : est.counts) {
      (void)r;
      CHECK(n == 2);
    }
    CHECK(est.classification == "two");
  }
  SUBCASE("the infinite dihedral product of two order-2 tables has two ends") {
    EndsEstimate est = ends_estimate(space_of(kDihedral), 4);
    CHECK(est.classification == "two");
  }
  SUBCASE("the rank-2 free group branches: 4, 12, 36 components") {
    EndsEstimate est = ends_estimate(space_of(kF2), 3);
    REQUIRE(est.counts.size() == 3);
    CHECK(est.counts[0] == std::pair<int, std::int64_t>(1, 4));
    CHECK(est.counts[1] == std::pair<int, std::int64_t>(2, 12));
    CHECK(est.counts[2] == std::pair<int, std::int64_t>(3, 36));
    CHECK(est.classification == "many");
  }
  SUBCASE("a finite space runs out") {
    EndsEstimate est = ends_estimate(space_of(kZ3), 3);
    CHECK(est.classification == "zero");
  }
  SUBCASE("horizons under three radii are refused") {
    CHECK_THROWS_AS(ends_estimate(space_of(kZ), 2), SpecError);
  }
}

TEST_CASE("localize_vertex_space walks the copy tree to the image") {
  LocalGraph z2 = space_of(kZ2);
  LocalGraph model = build_space(SpaceSpec::from_json(json::parse(
      std::string(R"({"kind":"space_free_product","x":)") + kZ2 + ",\"y\":" + kZ + "}")));

  SUBCASE("an image inside the root copy is located there exactly") {
    VertexMap f = root_copy_map(z2, model, 3);
    LocalizationReport rep = localize_vertex_space(f, model);
    CHECK(rep.located_copy == "X@-");
    CHECK(rep.r_emp == 0);
    CHECK(rep.bundles.empty());
    CHECK(rep.contradiction.empty());
  }

  SUBCASE("a few strays into a child copy do not move the location") {
    VertexMap f = root_copy_map(z2, model, 3);
    f.forward["(+9,0)"] = "X@-/Y@(+1,0)#0";    // one step off the root copy
    f.forward["(+9,+1)"] = "X@-/Y@(+1,0)#+1";  // two steps off
    LocalizationReport rep = localize_vertex_space(f, model);
    CHECK(rep.located_copy == "X@-");
    CHECK(rep.r_emp == 2);
    REQUIRE(rep.bundles.size() == 1);
    CHECK(rep.bundles[0].parent_copy == "X@-");
    CHECK(rep.bundles[0].child_copy == "X@-/Y@(+1,0)");
    CHECK(rep.bundles[0].inside == 2);
    CHECK(rep.bundles[0].direction == -1);
    CHECK(rep.contradiction.empty());
  }

  SUBCASE("an even straddle locates nothing") {
    VertexMap f;
    f.source = z2;
    f.target = model;
    f.outer_radius = 3;
    f.forward["(0,0)"] = "X@-#(0,0)";
    f.forward["(+1,0)"] = "X@-/Y@(+1,0)#0";
    LocalizationReport rep = localize_vertex_space(f, model);
    CHECK(rep.located_copy.empty());
    CHECK(rep.r_emp == -1);
    REQUIRE(rep.bundles.size() == 1);
    CHECK(rep.bundles[0].direction == 0);
  }

  SUBCASE("evidence pointing past the horizon is a contradiction, not a location") {
    LocalGraph zz = build_space(SpaceSpec::from_json(json::parse(
        std::string(R"({"kind":"space_free_product","x":)") + kZ + ",\"y\":" + kZ + "}")));
    VertexMap f;
    f.source = space_of(kZ);
    f.target = zz;
    f.outer_radius = 1;
    f.forward["0"] = "Y@-#0";  // all weight in a copy that only touches the boundary
    LocalizationReport rep = localize_vertex_space(f, zz);
    CHECK(rep.located_copy.empty());
    CHECK(rep.contradiction.find("widen the scope") != std::string::npos);
  }

  SUBCASE("models without copy labels are refused") {
    VertexMap f = root_copy_map(z2, model, 3);
    CHECK_THROWS_AS(localize_vertex_space(f, z2), MalformedSpaceError);
  }

  SUBCASE("an image that misses the scope ball is refused") {
    VertexMap f;
    f.source = z2;
    f.target = model;
    f.outer_radius = 1;
    f.forward["(0,0)"] = "X@-#(+9,0)";
    CHECK_THROWS_WITH_AS(localize_vertex_space(f, model), doctest::Contains("misses"),
                         HypothesisError);
  }
}
