#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "qig/errors.hpp"
#include "qig/graph.hpp"
#include "qig/group_spec.hpp"
#include "qig/groups.hpp"
#include "qig/models.hpp"
#include "qig/product.hpp"
#include "support.hpp"

using namespace qig;
using nlohmann::json;

namespace {

const char* kZ = R"({"kind":"free_abelian","rank":1})";
const char* kZ2 = R"({"kind":"finite_table","names":["0","1"],"table":[[0,1],[1,0]]})";
const char* kZ3 = R"({"kind":"finite_table","names":["0","1","2"],"table":[[0,1,2],[1,2,0],[2,0,1]]})";
const char* kZ4 =
    R"({"kind":"finite_table","names":["0","1","2","3"],
        "table":[[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]]})";
const char* kPoint = R"({"kind":"finite_table","names":["e"],"table":[[0]]})";

LocalGraph space_of(const std::string& text) {
  return build_space(SpaceSpec::from_json(json::parse(text)));
}

GroupSpec group_of(const std::string& text) { return GroupSpec::from_json(json::parse(text)); }

// Cyclic group of order n with an explicit generating set, as JSON text.
std::string cyclic_json(int n, const std::vector<int>& gens) {
  json j;
  j["kind"] = "finite_table";
  for (int i = 0; i < n; ++i) {
    j["names"].push_back(std::to_string(i));
    json row = json::array();
    for (int k = 0; k < n; ++k) row.push_back((i + k) % n);
    j["table"].push_back(row);
  }
  for (int g : gens) j["generators"].push_back(std::to_string(g));
  return j.dump();
}

template <class Fn>
std::string spec_error_message(Fn&& fn) {
  try {
    fn();
  } catch (const SpecError& e) {
    return e.what();
  }
  return "";
}

// Exhaustive agreement between the closed-form metric and plain BFS over all
// pairs in a basepoint ball, plus symmetry of the closed form.
void check_metric_matches_bfs(const LocalGraph& g, int radius, int cap) {
  REQUIRE(g.metric);
  LocalGraph m = memoized(g);
  FiniteBall b = ball(m, m.basepoint, radius);
  oracle::Neighbors nb = [&m](const std::string& v) { return m.neighbors(v); };
  for (std::size_t i = 0; i < b.vertices.size(); ++i)
    for (std::size_t j = i; j < b.vertices.size(); ++j) {
      const Addr& u = b.vertices[i];
      const Addr& v = b.vertices[j];
      int expected = oracle::distance(nb, u, v, cap);
      REQUIRE(expected >= 0);
      CHECK(g.metric->dist(u, v) == expected);
      CHECK(g.metric->dist(v, u) == expected);
    }
}

// The ray must start at the basepoint, move along edges, and realize
// d(basepoint, step(k)) == k.
void check_ray_geodesic(const LocalGraph& g, int steps) {
  REQUIRE(g.ray);
  CHECK(g.ray->step(0) == g.basepoint);
  oracle::Neighbors nb = [&g](const std::string& v) { return g.neighbors(v); };
  for (int k = 0; k < steps; ++k) {
    Addr cur = g.ray->step(k), next = g.ray->step(k + 1);
    auto ns = g.neighbors(cur);
    CHECK(std::find(ns.begin(), ns.end(), next) != ns.end());
    if (g.metric)
      CHECK(g.metric->dist(g.basepoint, next) == k + 1);
    else
      CHECK(oracle::distance(nb, g.basepoint, next, steps + 1) == k + 1);
  }
}

}  // namespace

TEST_CASE("free product of two lines: addresses, ball, metric") {
  LocalGraph p = free_product_space(space_of(kZ), space_of(kZ));
  CHECK(p.name == "(Z)*(Z)");
  CHECK(p.basepoint == "X@-#0");
  CHECK(p.valence_bound == 3);
  CHECK(p.is_infinite);

  CHECK(p.neighbors("X@-#0") == std::vector<Addr>{"X@-#+1", "X@-#-1", "Y@-#0"});

  FiniteBall b = ball(p, p.basepoint, 2);
  CHECK(b.vertices == std::vector<Addr>{"X@-#0", "X@-#+1", "X@-#-1", "Y@-#0", "X@-#+2", "X@-#-2",
                                        "X@-/Y@+1#0", "X@-/Y@-1#0", "Y@-#+1", "Y@-#-1"});
  CHECK(b.edges.size() == 9);

  REQUIRE(p.metric);
  CHECK(p.metric->dist("X@-#0", "X@-/Y@+1#0") == 2);
  CHECK(p.metric->dist("X@-#+2", "X@-/Y@+1#0") == 2);
  CHECK(p.metric->dist("X@-/Y@+1#+3", "X@-/Y@-1#-2") == 9);
  CHECK(p.metric->dist("X@-/Y@+1#+1", "Y@-#-2") == 6);

  check_metric_matches_bfs(p, 3, 8);

  // Ray: the X factor's ray lifted into the root copy.
  check_ray_geodesic(p, 6);
  CHECK(p.ray->step(2) == "X@-#+2");

  REQUIRE(p.labels);
  CHECK(p.labels->copy_of("X@-#0") == "X@-");
  CHECK(p.labels->copy_of("X@-/Y@+1#0") == "X@-/Y@+1");
  CHECK(p.labels->side_of("X@-/Y@+1#0") == 'Y');
  CHECK(p.labels->leaf_of("X@-/Y@+1#0") == "0");
  CHECK(p.labels->is_cross("X@-#0", "Y@-#0"));
  CHECK(!p.labels->is_cross("X@-#+1", "X@-#+2"));
}

TEST_CASE("free product rejects malformed addresses") {
  LocalGraph p = free_product_space(space_of(kZ), space_of(kZ));
  CHECK(spec_error_message([&] { p.neighbors("X@-/X@+1#0"); }).find("alternate") !=
        std::string::npos);
  CHECK(spec_error_message([&] { p.neighbors("X@+1#0"); }).find("root") != std::string::npos);
  CHECK(spec_error_message([&] { p.neighbors("X@-/Y@0#0"); }).find("basepoint") !=
        std::string::npos);
  CHECK(spec_error_message([&] { p.neighbors("Z@-#0"); }).find("side") != std::string::npos);
  CHECK(spec_error_message([&] { p.neighbors("X@-/Y@-#0"); }).find("root") != std::string::npos);
  CHECK_THROWS_AS(p.metric->dist("X@-", "X@-#0"), SpecError);
}

TEST_CASE("free product of two 2-point spaces is the bi-infinite line") {
  LocalGraph p = space_of(std::string(R"({"kind":"space_free_product","x":)") + kZ2 +
                          ",\"y\":" + kZ2 + "}");
  CHECK(p.is_infinite);  // both factors finite, both non-trivial
  CHECK(p.valence_bound == 2);

  FiniteBall b = ball(p, p.basepoint, 3);
  CHECK(b.vertices == std::vector<Addr>{"X@-#0", "X@-#1", "Y@-#0", "X@-/Y@1#0", "Y@-#1",
                                        "X@-/Y@1#1", "Y@-/X@1#0"});
  CHECK(b.edges.size() == 6);

  // Alternating descent through the copy tree, two steps per level.
  REQUIRE(p.ray);
  CHECK(p.ray->step(0) == "X@-#0");
  CHECK(p.ray->step(1) == "X@-#1");
  CHECK(p.ray->step(2) == "X@-/Y@1#0");
  CHECK(p.ray->step(3) == "X@-/Y@1#1");
  CHECK(p.ray->step(4) == "X@-/Y@1/X@1#0");
  check_ray_geodesic(p, 9);

  REQUIRE(p.metric);
  CHECK(p.metric->dist("X@-/Y@1/X@1#1", "Y@-/X@1#1") == 9);
  check_metric_matches_bfs(p, 4, 10);

  // The built space round-trips through its own serialized description.
  REQUIRE(!p.spec_json.empty());
  LocalGraph again = build_space(SpaceSpec::from_json(json::parse(p.spec_json)));
  CHECK(again.basepoint == p.basepoint);
  CHECK(again.neighbors(p.basepoint) == p.neighbors(p.basepoint));
}

TEST_CASE("free product with only an infinite second factor crosses the base edge") {
  LocalGraph p = free_product_space(space_of(kZ3), space_of(kZ));
  REQUIRE(p.ray);
  CHECK(p.ray->step(0) == "X@-#0");
  CHECK(p.ray->step(1) == "Y@-#0");
  CHECK(p.ray->step(2) == "Y@-#+1");
  check_ray_geodesic(p, 6);
  check_metric_matches_bfs(p, 3, 8);

  // A trivial factor contributes nothing but the base edge.
  LocalGraph q = free_product_space(space_of(kPoint), space_of(kZ));
  CHECK(q.basepoint == "X@-#e");
  CHECK(q.neighbors("X@-#e") == std::vector<Addr>{"Y@-#0"});
  CHECK(q.is_infinite);
  REQUIRE(q.metric);
  CHECK(q.metric->dist("X@-#e", "Y@-#+2") == 3);
}

TEST_CASE("nested free products wrap inner addresses in braces") {
  LocalGraph inner = free_product_space(space_of(kZ2), space_of(kZ2));
  LocalGraph outer = free_product_space(inner, space_of(kZ));
  CHECK(outer.basepoint == "X@-#{X@-#0}");
  CHECK(outer.neighbors(outer.basepoint) ==
        std::vector<Addr>{"X@-#{X@-#1}", "X@-#{Y@-#0}", "Y@-#0"});
  REQUIRE(outer.metric);
  CHECK(outer.metric->dist(outer.basepoint, "X@-/Y@{X@-#1}#+2") == 4);
  REQUIRE(outer.labels);
  CHECK(outer.labels->copy_of("X@-/Y@{X@-#1}#+2") == "X@-/Y@{X@-#1}");
  CHECK(outer.labels->leaf_of("X@-/Y@{X@-#1}#+2") == "+2");
  check_metric_matches_bfs(outer, 3, 8);
}

TEST_CASE("wedge joins the two halves by one basepoint edge") {
  LocalGraph w = wedge(space_of(kZ), space_of(kZ));
  CHECK(w.name == "wedge(Z,Z)");
  CHECK(w.basepoint == "X@-#0");
  CHECK(w.valence_bound == 3);
  CHECK(w.is_infinite);

  CHECK(w.neighbors("X@-#0") == std::vector<Addr>{"X@-#+1", "X@-#-1", "Y@-#0"});
  CHECK(w.neighbors("Y@-#0") == std::vector<Addr>{"Y@-#+1", "Y@-#-1", "X@-#0"});
  CHECK(w.neighbors("Y@-#+1") == std::vector<Addr>{"Y@-#+2", "Y@-#0"});
  CHECK(spec_error_message([&] { w.neighbors("X@-/Y@1#0"); }).find("not a wedge address") !=
        std::string::npos);

  FiniteBall b = ball(w, w.basepoint, 2);
  CHECK(b.vertices == std::vector<Addr>{"X@-#0", "X@-#+1", "X@-#-1", "Y@-#0", "X@-#+2", "X@-#-2",
                                        "Y@-#+1", "Y@-#-1"});
  CHECK(b.edges.size() == 7);

  REQUIRE(w.metric);
  CHECK(w.metric->dist("X@-#+2", "Y@-#-1") == 4);
  CHECK(w.metric->dist("X@-#+2", "X@-#-1") == 3);
  CHECK(w.metric->dist("X@-#0", "Y@-#+2") == 3);
  check_metric_matches_bfs(w, 3, 8);

  check_ray_geodesic(w, 6);
  CHECK(w.ray->step(2) == "X@-#+2");

  REQUIRE(w.labels);
  CHECK(w.labels->side_of("Y@-#+1") == 'Y');
  CHECK(w.labels->is_cross("X@-#0", "Y@-#0"));
  CHECK(!w.labels->is_cross("X@-#0", "X@-#+1"));

  // Ray crosses the joining edge when only the Y half is infinite.
  LocalGraph w2 = wedge(space_of(kZ3), space_of(kZ));
  REQUIRE(w2.ray);
  CHECK(w2.ray->step(0) == "X@-#0");
  CHECK(w2.ray->step(1) == "Y@-#0");
  CHECK(w2.ray->step(2) == "Y@-#+1");
  check_ray_geodesic(w2, 6);
}

TEST_CASE("pendant extension adds one vertex next to the basepoint") {
  LocalGraph p = plus(space_of(kZ));
  CHECK(p.name == "(Z)+");
  CHECK(p.basepoint == "0");
  CHECK(p.valence_bound == 3);
  CHECK(p.is_infinite);

  CHECK(p.neighbors("0") == std::vector<Addr>{"+1", "-1", "+"});
  CHECK(p.neighbors("+") == std::vector<Addr>{"0"});
  CHECK(p.neighbors("+1") == std::vector<Addr>{"+2", "0"});

  REQUIRE(p.metric);
  CHECK(p.metric->dist("+", "+") == 0);
  CHECK(p.metric->dist("+", "0") == 1);
  CHECK(p.metric->dist("+", "+3") == 4);
  CHECK(p.metric->dist("+2", "-1") == 3);
  check_metric_matches_bfs(p, 3, 8);

  FiniteBall b = ball(p, "0", 2);
  CHECK(b.vertices == std::vector<Addr>{"0", "+", "+1", "-1", "+2", "-2"});
  CHECK(b.edges.size() == 5);

  check_ray_geodesic(p, 6);

  LocalGraph q = plus(space_of(kPoint));
  CHECK(!q.is_infinite);
  CHECK(q.neighbors("e") == std::vector<Addr>{"+"});
  CHECK(q.metric->dist("+", "e") == 1);

  // Combinators nest through the spec grammar.
  LocalGraph nested = space_of(std::string(R"({"kind":"plus","x":{"kind":"wedge","x":)") + kZ +
                               ",\"y\":" + kZ + "}}");
  CHECK(nested.name == "(wedge(Z,Z))+");
  CHECK(nested.neighbors("X@-#0") == std::vector<Addr>{"X@-#+1", "X@-#-1", "Y@-#0", "+"});
}

TEST_CASE("amalgam tree model: bundles, metric, descent ray") {
  GroupSpec spec = group_of(std::string(R"({"kind":"amalgam","f":)") + kZ2 + ",\"a\":" + kZ4 +
                            ",\"b\":" + kZ4 + "}");
  LocalGraph g = amalgam_model(spec);
  CHECK(g.name == "model:amalgam(4,4;2)");
  CHECK(g.basepoint == "A@-#0");
  CHECK(g.valence_bound == 4);
  CHECK(g.is_infinite);

  // Root bundle pairs identity-coset vertices across the two roots; every
  // other vertex hangs a child copy of the opposite side.
  CHECK(g.neighbors("A@-#0") == std::vector<Addr>{"A@-#1", "A@-#2", "A@-#3", "B@-#0"});
  CHECK(g.neighbors("B@-#0") == std::vector<Addr>{"B@-#1", "B@-#2", "B@-#3", "A@-#0"});
  CHECK(g.neighbors("A@-#2").back() == "B@-#2");
  CHECK(g.neighbors("A@-#1").back() == "A@-/B@1#0");
  CHECK(g.neighbors("A@-#3").back() == "A@-/B@1#2");
  CHECK(g.neighbors("A@-/B@1#0").back() == "A@-#1");
  CHECK(g.neighbors("A@-/B@1#2").back() == "A@-#3");
  CHECK(g.neighbors("A@-/B@1#1").back() == "A@-/B@1/A@1#0");
  CHECK(g.neighbors("B@-#1").back() == "B@-/A@1#0");

  REQUIRE(g.metric);
  CHECK(g.metric->dist("A@-#0", "B@-#0") == 1);
  CHECK(g.metric->dist("A@-#0", "B@-#1") == 2);
  CHECK(g.metric->dist("A@-#1", "B@-#1") == 3);
  CHECK(g.metric->dist("A@-#0", "A@-/B@1/A@1#2") == 4);
  check_metric_matches_bfs(g, 3, 10);

  REQUIRE(g.ray);
  CHECK(g.ray->step(0) == "A@-#0");
  CHECK(g.ray->step(1) == "A@-#1");
  CHECK(g.ray->step(2) == "A@-/B@1#0");
  CHECK(g.ray->step(3) == "A@-/B@1#1");
  CHECK(g.ray->step(4) == "A@-/B@1/A@1#0");
  check_ray_geodesic(g, 9);

  REQUIRE(g.labels);
  CHECK(g.labels->copy_of("A@-/B@1#2") == "A@-/B@1");
  CHECK(g.labels->side_of("A@-/B@1#2") == 'B');
  CHECK(g.labels->leaf_of("A@-/B@1#2") == "2");
  CHECK(g.labels->is_cross("A@-#1", "A@-/B@1#0"));
  CHECK(!g.labels->is_cross("A@-#1", "A@-#2"));

  CHECK(spec_error_message([&] { g.neighbors("A@-/A@1#0"); }).find("alternate") !=
        std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("A@-/B@0#0"); }).find("representative") !=
        std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("A@-/B@2#0"); }).find("representative") !=
        std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("A@-/B@3#0"); }).find("representative") !=
        std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("C@-#0"); }).find("root") != std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("A@1#0"); }).find("root") != std::string::npos);

  // Same graph through the space-spec grammar.
  json mj = json::parse(g.spec_json);
  CHECK(mj["kind"] == "amalgam_model");
  LocalGraph again = build_space(SpaceSpec::from_json(mj));
  CHECK(again.basepoint == g.basepoint);
  CHECK(again.neighbors("A@-#3") == g.neighbors("A@-#3"));
}

TEST_CASE("amalgam tree model: finite and metric-less variants") {
  // One side equal to the edge group: the copy tree is finite.
  GroupSpec small = group_of(std::string(R"({"kind":"amalgam","f":)") + kZ2 + ",\"a\":" + kZ2 +
                             ",\"b\":" + kZ4 + "}");
  LocalGraph g = amalgam_model(small);
  CHECK(!g.is_infinite);
  CHECK(!g.ray);
  REQUIRE(g.metric);
  CHECK(g.metric->dist("A@-#0", "B@-#1") == 2);
  check_metric_matches_bfs(g, 4, 10);

  // Door spacing mismatch between the two sides: the closed form declines and
  // callers fall back to BFS.
  GroupSpec skew = group_of(std::string(R"({"kind":"amalgam","f":)") + cyclic_json(5, {1, 2, 3, 4}) +
                            ",\"a\":" + cyclic_json(10, {1, 9}) + ",\"b\":" +
                            cyclic_json(10, {1, 2, 3, 4, 5, 6, 7, 8, 9}) + "}");
  LocalGraph h = amalgam_model(skew);
  CHECK(!h.metric);
  CHECK(h.is_infinite);
  CHECK(ball(h, h.basepoint, 2).vertices.size() > 1);  // neighbors stay consistent
  CHECK(*distance(h, "A@-#0", "B@-#3", 10) == 2);
}

TEST_CASE("hnn tree model: two cross edges everywhere, stable-letter ray") {
  GroupSpec spec = group_of(std::string(R"({"kind":"hnn","f":)") + kZ2 + ",\"a\":" + kZ4 + "}");
  LocalGraph g = hnn_model(spec);
  CHECK(g.name == "model:hnn(4;2)");
  CHECK(g.basepoint == "A@-#0");
  CHECK(g.valence_bound == 5);
  CHECK(g.is_infinite);

  CHECK(g.neighbors("A@-#0") ==
        std::vector<Addr>{"A@-#1", "A@-#2", "A@-#3", "A@-/O@0#0", "A@-/I@0#0"});
  CHECK(g.neighbors("A@-#1") ==
        std::vector<Addr>{"A@-#2", "A@-#3", "A@-#0", "A@-/O@1#0", "A@-/I@1#0"});
  CHECK(g.neighbors("A@-#3") ==
        std::vector<Addr>{"A@-#0", "A@-#1", "A@-#2", "A@-/O@1#2", "A@-/I@1#2"});

  // Identity bundles of a child lead back to its parent; the like-direction
  // identity child is a genuine grandchild.
  auto down = g.neighbors("A@-/O@0#0");
  CHECK(std::find(down.begin(), down.end(), "A@-#0") != down.end());
  CHECK(std::find(down.begin(), down.end(), "A@-/O@0/O@0#0") != down.end());
  auto up = g.neighbors("A@-/I@0#0");
  CHECK(std::find(up.begin(), up.end(), "A@-#0") != up.end());
  CHECK(std::find(up.begin(), up.end(), "A@-/I@0/I@0#0") != up.end());

  CHECK(spec_error_message([&] { g.neighbors("A@-/O@0/I@0#0"); }).find("parent") !=
        std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("A@-/I@0/O@0#0"); }).find("parent") !=
        std::string::npos);
  CHECK(g.neighbors("A@-/O@0/I@1#0").size() == 5);  // non-identity reps are fine either way
  CHECK(spec_error_message([&] { g.neighbors("A@-/O@2#0"); }).find("representative") !=
        std::string::npos);
  CHECK(spec_error_message([&] { g.neighbors("B@-#0"); }).find("root") != std::string::npos);

  REQUIRE(g.metric);
  CHECK(g.metric->dist("A@-#0", "A@-/O@1#2") == 2);
  CHECK(g.metric->dist("A@-/O@0#1", "A@-/I@0#3") == 4);
  check_metric_matches_bfs(g, 3, 10);

  REQUIRE(g.ray);
  CHECK(g.ray->step(1) == "A@-/O@0#0");
  CHECK(g.ray->step(2) == "A@-/O@0/O@0#0");
  check_ray_geodesic(g, 8);

  REQUIRE(g.labels);
  CHECK(g.labels->copy_of("A@-/O@0#1") == "A@-/O@0");
  CHECK(g.labels->side_of("A@-/O@0#1") == 'O');
  CHECK(g.labels->is_cross("A@-#0", "A@-/I@0#0"));

  json mj = json::parse(g.spec_json);
  CHECK(mj["kind"] == "hnn_model");
  LocalGraph again = build_space(SpaceSpec::from_json(mj));
  CHECK(again.neighbors("A@-/O@1#0") == g.neighbors("A@-/O@1#0"));

  // Edge group equal to the whole vertex group: a line of copies.
  GroupSpec full = group_of(std::string(R"({"kind":"hnn","f":)") + kZ4 + ",\"a\":" + kZ4 + "}");
  LocalGraph line = hnn_model(full);
  CHECK(line.is_infinite);
  REQUIRE(line.metric);
  CHECK(line.metric->dist("A@-#0", "A@-/O@0#1") == 2);
  check_metric_matches_bfs(line, 3, 10);
}
