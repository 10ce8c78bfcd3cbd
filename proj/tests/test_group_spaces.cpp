#include <doctest.h>

#include <array>
#include <map>
#include <random>
#include <set>

#include "qig/errors.hpp"
#include "qig/graph.hpp"
#include "qig/group_spec.hpp"
#include "qig/groups.hpp"
#include "support.hpp"

using namespace qig;
using nlohmann::json;

namespace {

const char* kZ2 = R"({"kind":"finite_table","names":["0","1"],"table":[[0,1],[1,0]]})";
const char* kZ3 = R"({"kind":"finite_table","names":["0","1","2"],"table":[[0,1,2],[1,2,0],[2,0,1]]})";
const char* kZ4 =
    R"({"kind":"finite_table","names":["0","1","2","3"],
        "table":[[0,1,2,3],[1,2,3,0],[2,3,0,1],[3,0,1,2]]})";
const char* kKlein =
    R"({"kind":"finite_table","names":["00","01","10","11"],
        "table":[[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]]})";

GroupSpec spec_of(const std::string& text) { return GroupSpec::from_json(json::parse(text)); }

GroupSpec z2z3_spec() {
  return spec_of(std::string(R"({"kind":"free_product","factors":[)") + kZ2 + "," + kZ3 + "]}");
}
GroupSpec amalgam_spec() {
  return spec_of(std::string(R"({"kind":"amalgam","f":)") + kZ2 + ",\"a\":" + kZ4 +
                 ",\"b\":" + kZ4 + "}");
}
GroupSpec hnn_spec() {
  return spec_of(std::string(R"({"kind":"hnn","f":)") + kZ2 + ",\"a\":" + kZ4 + "}");
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

// Checks that two labelings of the same walk set never disagree: whenever two
// walks land on the same library address they must have the same oracle value,
// and vice versa. With an injective oracle this pins the library's equality
// relation exactly on the sampled elements.
template <class Key>
struct EqualityCrossCheck {
  std::map<Addr, Key> by_addr;
  std::map<Key, Addr> by_key;
  int collisions = 0;
  void feed(const Addr& a, const Key& k) {
    auto [it, fresh] = by_addr.emplace(a, k);
    if (!fresh) {
      ++collisions;
      CHECK(it->second == k);
    }
    auto [jt, fresh2] = by_key.emplace(k, a);
    if (!fresh2) CHECK(jt->second == a);
  }
};

// Isometries x -> s*x + t of the integers (s = ±1): a faithful model of the
// infinite dihedral group.
struct AffineZ {
  int s = 1;
  long long t = 0;
  friend AffineZ operator*(const AffineZ& a, const AffineZ& b) {
    return {a.s * b.s, a.s * b.t + a.t};
  }
  auto operator<=>(const AffineZ&) const = default;
};

// 2x2 integer matrices up to sign: the classic faithful model of the modular
// group, into which the order-2 * order-3 free product embeds.
struct MatMod {
  std::array<long long, 4> m{1, 0, 0, 1};
  friend MatMod operator*(const MatMod& a, const MatMod& b) {
    return {{a.m[0] * b.m[0] + a.m[1] * b.m[2], a.m[0] * b.m[1] + a.m[1] * b.m[3],
             a.m[2] * b.m[0] + a.m[3] * b.m[2], a.m[2] * b.m[1] + a.m[3] * b.m[3]}};
  }
  std::array<long long, 4> canon() const {
    for (long long v : m) {
      if (v > 0) return m;
      if (v < 0) return {-m[0], -m[1], -m[2], -m[3]};
    }
    return m;
  }
  friend bool operator==(const MatMod& a, const MatMod& b) { return a.canon() == b.canon(); }
  friend bool operator<(const MatMod& a, const MatMod& b) { return a.canon() < b.canon(); }
};

// Reduced alternating words over an involution x and an infinite-order letter
// t: a faithful model of the order-2 * infinite-cyclic free product.
struct InvZWord {
  std::vector<std::pair<char, long long>> sylls;  // ('x', 1) or ('t', k != 0)
  void push(char sym, long long exp) {
    if (!sylls.empty() && sylls.back().first == sym) {
      long long merged = sylls.back().second + exp;
      if (sym == 'x') merged %= 2;
      if (merged == 0)
        sylls.pop_back();
      else
        sylls.back().second = merged;
    } else {
      long long e = sym == 'x' ? ((exp % 2) + 2) % 2 : exp;
      if (e != 0) sylls.push_back({sym, e});
    }
  }
  friend InvZWord operator*(const InvZWord& a, const InvZWord& b) {
    InvZWord out = a;
    for (auto [sym, exp] : b.sylls) out.push(sym, exp);
    return out;
  }
  auto operator<=>(const InvZWord&) const = default;
};

}  // namespace

TEST_CASE("finite table validation names the broken axiom") {
  auto parse_table = [](const std::string& body) {
    return [body] { FiniteTableData::from_json(json::parse(body)); };
  };
  CHECK(spec_error_message(parse_table(
            R"({"names":["e","x","y"],"table":[[0,1,2],[1,2,0],[2,0,0]]})"))
            .find("associativity") != std::string::npos);
  CHECK(spec_error_message(parse_table(R"({"names":["x","y"],"table":[[1,0],[1,0]]})"))
            .find("identity") != std::string::npos);
  CHECK(spec_error_message(parse_table(R"({"names":["x","x"],"table":[[0,1],[1,0]]})"))
            .find("duplicate") != std::string::npos);
  CHECK(spec_error_message(parse_table(R"({"names":["0","a b"],"table":[[0,1],[1,0]]})"))
            .find("invalid element name") != std::string::npos);
  CHECK(spec_error_message(parse_table(
            R"({"names":["0","1","2"],"table":[[0,1,2],[1,2,0],[2,0,1]],"generators":["1"]})"))
            .find("not symmetric") != std::string::npos);
  CHECK(spec_error_message(parse_table(
            R"({"names":["0","1"],"table":[[0,1],[1,0]],"generators":["0","1"]})"))
            .find("identity") != std::string::npos);
  // Klein four-group generated by one element only: saturation must fail.
  CHECK(spec_error_message([] {
          FiniteTableData::from_json(json::parse(
              R"({"names":["00","01","10","11"],
                  "table":[[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]],
                  "generators":["01"]})"));
        }).find("does not generate") != std::string::npos);
}

TEST_CASE("embeddings: validation and least-image inference") {
  auto z2 = FiniteTableData::from_json(json::parse(kZ2));
  auto z3 = FiniteTableData::from_json(json::parse(kZ3));
  auto z4 = FiniteTableData::from_json(json::parse(kZ4));
  auto klein = FiniteTableData::from_json(json::parse(kKlein));

  CHECK(Embedding::infer(z2, z4).image == std::vector<int>{0, 2});
  CHECK(Embedding::infer(z2, klein).image == std::vector<int>{0, 1});
  CHECK(Embedding::infer(z2, z2).image == std::vector<int>{0, 1});

  CHECK(spec_error_message([&] { Embedding::from_json(json::parse(R"(["0"])"), z2, z4); })
            .find("length") != std::string::npos);
  CHECK(spec_error_message([&] { Embedding::from_json(json::parse(R"(["0","0"])"), z2, z4); })
            .find("injective") != std::string::npos);
  CHECK(spec_error_message([&] { Embedding::from_json(json::parse(R"(["0","1"])"), z2, z4); })
            .find("homomorphism") != std::string::npos);
  CHECK(spec_error_message([&] { Embedding::infer(z3, z4); }).find("no embedding") !=
        std::string::npos);
}

TEST_CASE("left cosets: frozen partitions") {
  auto z2 = FiniteTableData::from_json(json::parse(kZ2));
  auto z4 = FiniteTableData::from_json(json::parse(kZ4));
  auto klein = FiniteTableData::from_json(json::parse(kKlein));

  auto p = left_cosets(z4, Embedding::infer(z2, z4));
  CHECK(p.cosets == std::vector<std::vector<int>>{{0, 2}, {1, 3}});
  CHECK(p.rep_of == std::vector<int>{0, 1});
  CHECK(p.coset_of == std::vector<int>{0, 1, 0, 1});
  CHECK(p.identity_coset == 0);

  auto q = left_cosets(klein, Embedding::infer(z2, klein));
  CHECK(q.cosets == std::vector<std::vector<int>>{{0, 1}, {2, 3}});
  CHECK(q.rep_of == std::vector<int>{0, 2});
}

TEST_CASE("group spec orders, names, and JSON round trips") {
  CHECK(spec_of(kZ4).order() == 4);
  CHECK(!spec_of(kZ4).infinite());
  CHECK(spec_of(R"({"kind":"free_abelian","rank":2})").infinite());
  CHECK(spec_of(R"({"kind":"free","rank":2})").display_name() == "F2");
  CHECK(z2z3_spec().infinite());
  CHECK(amalgam_spec().infinite());
  CHECK(hnn_spec().infinite());
  CHECK(amalgam_spec().display_name() == "amalgam(4,4;2)");

  // A trivial-index amalgam is just its bigger side: finite.
  auto collapsed = spec_of(std::string(R"({"kind":"amalgam","f":)") + kZ4 + ",\"a\":" + kZ4 +
                           ",\"b\":" + kZ4 + "}");
  CHECK(collapsed.order() == 4);

  // Free product with at most one non-trivial factor is that factor.
  auto lone = spec_of(std::string(R"({"kind":"free_product","factors":[)") + kZ3 +
                      R"(,{"kind":"finite_table","names":["e"],"table":[[0]]}]})");
  CHECK(lone.order() == 3);

  for (const auto& s : {spec_of(kZ4), z2z3_spec(), amalgam_spec(), hnn_spec()}) {
    auto round = GroupSpec::from_json(s.to_json());
    CHECK(round.to_json() == s.to_json());
  }

  CHECK(spec_error_message([] { spec_of(R"({"kind":"free","rank":0})"); }).find("rank") !=
        std::string::npos);
  CHECK(spec_error_message([] { spec_of(R"({"kind":"nope"})"); }).find("unknown group kind") !=
        std::string::npos);
  CHECK(spec_error_message([] { spec_of(R"({"kind":"free_product","factors":[]})"); })
            .find("at least 2") != std::string::npos);
  // Amalgam sides must come with full multiplication tables.
  CHECK(spec_error_message([] {
          spec_of(R"({"kind":"amalgam","f":{"kind":"free","rank":1},
                      "a":{"kind":"free","rank":1},"b":{"kind":"free","rank":1}})");
        }).find("finite table") != std::string::npos);
}

TEST_CASE("finite Cayley graphs: triangle, complete graph, two points") {
  auto z3 = cayley(spec_of(kZ3));
  CHECK(!z3.is_infinite);
  auto b = ball(z3, z3.basepoint, 5);
  CHECK(b.vertices == std::vector<Addr>{"0", "1", "2"});
  CHECK(b.edges.size() == 3);

  auto klein = cayley(spec_of(kKlein));
  auto kb = ball(klein, klein.basepoint, 2);
  CHECK(kb.vertices.size() == 4);
  CHECK(kb.edges.size() == 6);  // complete graph on four vertices

  auto z2 = cayley(spec_of(kZ2));
  auto zb = ball(z2, z2.basepoint, 3);
  CHECK(zb.vertices.size() == 2);
  CHECK(zb.edges.size() == 1);
  CHECK_THROWS_AS(canonical_ray(z2), HypothesisError);
}

TEST_CASE("order-2 * order-2 product is the line") {
  auto spec = spec_of(std::string(R"({"kind":"free_product","factors":[)") + kZ2 + "," + kZ2 + "]}");
  auto g = cayley(spec);
  CHECK(g.is_infinite);
  auto b = ball(g, g.basepoint, 5);
  CHECK(b.vertices.size() == 11);
  CHECK(b.edges.size() == 10);
  for (const auto& v : b.vertices) CHECK(g.neighbors(v).size() == 2);
  CHECK(b.vertices[1] == "0:1");
  CHECK(b.vertices[2] == "1:1");
  CHECK(b.vertices[3] == "0:1.1:1");
  CHECK(b.vertices[4] == "1:1.0:1");

  // Faithful model: reflections of the integers.
  std::map<Addr, AffineZ> images{{"0:1", {-1, 0}}, {"1:1", {-1, 1}}};
  EqualityCrossCheck<AffineZ> xc;
  auto gen = oracle::rng(7011);
  std::uniform_int_distribution<int> pick(0, 1);
  std::uniform_int_distribution<int> len(0, 9);
  for (int trial = 0; trial < 300; ++trial) {
    Addr a = g.ops->identity();
    AffineZ m;
    int n = len(gen);
    for (int i = 0; i < n; ++i) {
      Addr s = pick(gen) ? "1:1" : "0:1";
      a = g.ops->mul(a, s);
      m = m * images.at(s);
    }
    xc.feed(a, m);
  }
  CHECK(xc.collisions > 20);
}

TEST_CASE("order-2 * order-3 product against the modular group") {
  auto g = cayley(z2z3_spec());
  auto b = ball(g, g.basepoint, 2);
  CHECK(b.vertices == std::vector<Addr>{"1", "0:1", "1:1", "1:2", "0:1.1:1", "0:1.1:2",
                                        "1:1.0:1", "1:2.0:1"});
  auto b1 = ball(g, g.basepoint, 1);
  CHECK(b1.edges.size() == 4);  // star plus the edge inside the order-3 factor

  CHECK(g.ops->mul("0:1", "0:1") == "1");
  CHECK(g.ops->mul("1:1", "1:2") == "1");
  CHECK(g.ops->mul("1:1", "1:1") == "1:2");
  CHECK(g.ops->inv("0:1.1:1") == "1:2.0:1");

  std::map<Addr, MatMod> images{
      {"0:1", {{0, -1, 1, 0}}},   // order two
      {"1:1", {{0, -1, 1, 1}}},   // order three
      {"1:2", {{-1, -1, 1, 0}}},  // its square
  };
  EqualityCrossCheck<MatMod> xc;
  auto gen = oracle::rng(7023);
  std::uniform_int_distribution<int> pick(0, 2);
  std::uniform_int_distribution<int> len(0, 8);
  std::vector<Addr> gens{"0:1", "1:1", "1:2"};
  for (int trial = 0; trial < 600; ++trial) {
    Addr a = g.ops->identity();
    MatMod m;
    int n = len(gen);
    for (int i = 0; i < n; ++i) {
      Addr s = gens[pick(gen)];
      a = g.ops->mul(a, s);
      m = m * images.at(s);
    }
    xc.feed(a, m);
    CHECK(g.ops->mul(a, g.ops->inv(a)) == "1");
  }
  CHECK(xc.collisions > 20);
}

TEST_CASE("free group arithmetic against the naive reducer") {
  auto f3 = cayley(spec_of(R"({"kind":"free","rank":3})"));
  auto gen = oracle::rng(9001);
  std::uniform_int_distribution<int> letter(1, 3);
  std::uniform_int_distribution<int> sign(0, 1);
  std::uniform_int_distribution<int> len(0, 30);
  for (int trial = 0; trial < 1000; ++trial) {
    Addr a = "1";
    oracle::FreeWord w;
    int n = len(gen);
    for (int i = 0; i < n; ++i) {
      int l = letter(gen) * (sign(gen) ? 1 : -1);
      std::string la(1, static_cast<char>('a' + (l > 0 ? l : -l) - 1));
      if (l < 0) la += "'";
      a = f3.ops->mul(a, la);
      w.push(l);
    }
    CHECK(a == oracle::free_word_addr(w));
    CHECK(f3.metric->dist("1", a) == static_cast<std::int64_t>(w.letters.size()));
    CHECK(f3.ops->mul(a, f3.ops->inv(a)) == "1");
  }
}

TEST_CASE("rank-2 lattice: frozen ball and sample identities") {
  auto z2 = cayley(spec_of(R"({"kind":"free_abelian","rank":2})"));
  CHECK(z2.basepoint == "(0,0)");
  auto b = ball(z2, z2.basepoint, 2);
  CHECK(b.vertices.size() == 13);
  CHECK(b.edges.size() == 16);
  CHECK(b.vertices[1] == "(+1,0)");
  CHECK(z2.ops->mul("(+1,-2)", "(-1,+2)") == "(0,0)");
  CHECK(z2.metric->dist("(+1,-2)", "(-1,+2)") == 6);
}

TEST_CASE("closed-form metrics agree with brute-force distances") {
  auto run = [](const LocalGraph& g, int radius, int samples, unsigned seed) {
    REQUIRE(g.metric);
    auto b = ball(g, g.basepoint, radius);
    auto gen = oracle::rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, b.vertices.size() - 1);
    for (int i = 0; i < samples; ++i) {
      const Addr &u = b.vertices[pick(gen)], &v = b.vertices[pick(gen)];
      int d = oracle::distance(g.neighbors, u, v, 4 * radius + 1);
      REQUIRE(d >= 0);
      CHECK(g.metric->dist(u, v) == d);
    }
  };
  run(cayley(spec_of(R"({"kind":"free","rank":2})")), 4, 60, 101);
  run(cayley(spec_of(R"({"kind":"free_abelian","rank":2})")), 3, 60, 102);
  run(cayley(z2z3_spec()), 4, 60, 103);
  run(cayley(spec_of(kKlein)), 2, 30, 104);
}

TEST_CASE("left translations act on the graph") {
  std::vector<LocalGraph> spaces;
  spaces.push_back(cayley(spec_of(R"({"kind":"free","rank":2})")));
  spaces.push_back(cayley(spec_of(R"({"kind":"free_abelian","rank":2})")));
  spaces.push_back(cayley(z2z3_spec()));
  spaces.push_back(cayley(amalgam_spec()));
  spaces.push_back(cayley(hnn_spec()));
  for (const auto& g : spaces) {
    REQUIRE(g.moves);
    auto b = ball(g, g.basepoint, 3);
    auto gen = oracle::rng(404);
    std::uniform_int_distribution<std::size_t> pick(0, b.vertices.size() - 1);
    auto base_nb = g.neighbors(g.basepoint);
    std::set<Addr> base_set(base_nb.begin(), base_nb.end());
    for (int i = 0; i < 15; ++i) {
      const Addr& v = b.vertices[pick(gen)];
      for (const Addr& w : g.neighbors(v)) {
        Addr moved = g.moves->to_basepoint(v, w);
        CHECK(base_set.count(moved) == 1);
        CHECK(g.moves->from_basepoint(v, moved) == w);
      }
      CHECK(g.moves->to_basepoint(v, v) == g.basepoint);
    }
  }
}

TEST_CASE("canonical rays are geodesic, embedded, and step by one") {
  std::vector<LocalGraph> spaces;
  spaces.push_back(cayley(spec_of(R"({"kind":"free_abelian","rank":1})")));
  spaces.push_back(cayley(spec_of(R"({"kind":"free_abelian","rank":2})")));
  spaces.push_back(cayley(spec_of(R"({"kind":"free","rank":2})")));
  spaces.push_back(cayley(z2z3_spec()));
  spaces.push_back(cayley(amalgam_spec()));
  spaces.push_back(cayley(hnn_spec()));
  for (const auto& g : spaces) {
    auto ray = canonical_ray(g);
    CHECK(ray->step(0) == g.basepoint);
    std::set<Addr> seen;
    for (int k = 0; k <= 6; ++k) {
      Addr p = ray->step(k);
      CHECK(seen.insert(p).second);
      CHECK(oracle::distance(g.neighbors, g.basepoint, p, 8) == k);
      if (k > 0) {
        auto nb = g.neighbors(ray->step(k - 1));
        CHECK(std::count(nb.begin(), nb.end(), p) == 1);
      }
    }
  }
  CHECK(cayley(spec_of(kZ3)).ray == nullptr);
}

TEST_CASE("amalgam engine: frozen forms and a faithful model") {
  auto g = cayley(amalgam_spec());
  auto base_nb = g.neighbors(g.basepoint);
  CHECK(base_nb == std::vector<Addr>{"A:1", "f:1", "A:1.f:1", "B:1", "B:1.f:1"});
  CHECK(g.valence_bound == 5);

  CHECK(g.ops->mul("A:1", "A:1") == "f:1");
  CHECK(g.ops->mul("f:1", "f:1") == "1");
  CHECK(g.ops->inv("A:1") == "A:1.f:1");
  CHECK(g.ops->mul("A:1", "B:1") == "A:1.B:1");
  CHECK(g.ops->inv("A:1.B:1") == "B:1.A:1");

  // Two-ended group: ball sizes grow by four per radius step.
  for (int r = 2; r <= 5; ++r)
    CHECK(ball(g, g.basepoint, r).vertices.size() == static_cast<std::size_t>(10 + 4 * (r - 2)));

  auto ray = canonical_ray(g);
  CHECK(ray->step(1) == "A:1");
  CHECK(ray->step(2) == "A:1.B:1");
  CHECK(ray->step(3) == "A:1.B:1.A:1");

  // Faithful model: infinite dihedral action times the abelianization
  // (order four times order two).
  struct Key {
    AffineZ d;
    int u4, u2;
    auto operator<=>(const Key&) const = default;
  };
  auto mulk = [](const Key& a, const Key& b) {
    return Key{a.d * b.d, (a.u4 + b.u4) % 4, (a.u2 + b.u2) % 2};
  };
  std::map<Addr, Key> images{
      {"A:1", {{-1, 0}, 1, 0}},      {"f:1", {{1, 0}, 2, 0}}, {"A:1.f:1", {{-1, 0}, 3, 0}},
      {"B:1", {{-1, 1}, 1, 1}},      {"B:1.f:1", {{-1, 1}, 3, 1}},
  };
  EqualityCrossCheck<Key> xc;
  auto gen = oracle::rng(7044);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_int_distribution<int> len(0, 6);
  for (int trial = 0; trial < 800; ++trial) {
    Addr a = "1";
    Key m{{1, 0}, 0, 0};
    int n = len(gen);
    for (int i = 0; i < n; ++i) {
      const Addr& s = base_nb[pick(gen)];
      a = g.ops->mul(a, s);
      m = mulk(m, images.at(s));
    }
    xc.feed(a, m);
    CHECK(g.ops->mul(a, g.ops->inv(a)) == "1");
  }
  CHECK(xc.collisions > 50);
}

TEST_CASE("stable-letter extension: frozen forms and a faithful model") {
  auto g = cayley(hnn_spec());
  auto base_nb = g.neighbors(g.basepoint);
  CHECK(base_nb == std::vector<Addr>{"a:1", "a:2", "a:3", "t:0", "T:0"});

  CHECK(g.ops->mul("t:0", "T:0") == "1");
  CHECK(g.ops->mul("T:0", "t:0") == "1");
  CHECK(g.ops->mul("a:1", "t:0") == "t:1");
  CHECK(g.ops->mul("t:0", "a:1") == "t:0.a:1");
  CHECK(g.ops->mul("a:2", "t:0") == "t:0.a:2");  // edge elements slide across t
  CHECK(g.ops->mul("t:0.a:1", "T:0") == "t:0.T:1");
  // (t a)^-1 = a^-1 t^-1; its normal form leads with the coset representative.
  CHECK(g.ops->inv("t:0.a:1") == "T:1.a:2");

  auto ray = canonical_ray(g);
  CHECK(ray->step(3) == "t:0.t:0.t:0");

  // Faithful model: involution * infinite-cyclic words, times the
  // abelianization (order four times the integers).
  struct Key {
    InvZWord w;
    int u4;
    long long uz;
    auto operator<=>(const Key&) const = default;
  };
  auto word_of = [](char sym, long long exp) {
    InvZWord w;
    w.push(sym, exp);
    return w;
  };
  std::map<Addr, Key> images{
      {"a:1", {word_of('x', 1), 1, 0}}, {"a:2", {InvZWord{}, 2, 0}},
      {"a:3", {word_of('x', 1), 3, 0}}, {"t:0", {word_of('t', 1), 0, 1}},
      {"T:0", {word_of('t', -1), 0, -1}},
  };
  auto mulk = [](const Key& a, const Key& b) {
    return Key{a.w * b.w, (a.u4 + b.u4) % 4, a.uz + b.uz};
  };
  EqualityCrossCheck<Key> xc;
  auto gen = oracle::rng(7055);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_int_distribution<int> len(0, 6);
  for (int trial = 0; trial < 800; ++trial) {
    Addr a = "1";
    Key m{InvZWord{}, 0, 0};
    int n = len(gen);
    for (int i = 0; i < n; ++i) {
      const Addr& s = base_nb[pick(gen)];
      a = g.ops->mul(a, s);
      m = mulk(m, images.at(s));
    }
    xc.feed(a, m);
    CHECK(g.ops->mul(a, g.ops->inv(a)) == "1");
  }
  CHECK(xc.collisions > 40);
}

TEST_CASE("nested products escape inner addresses") {
  auto spec = spec_of(std::string(R"({"kind":"free_product","factors":[)") +
                      R"({"kind":"free_product","factors":[)" + kZ2 + "," + kZ3 + "]}," + kZ2 +
                      "]}");
  auto g = cayley(spec);
  auto nb = g.neighbors(g.basepoint);
  CHECK(nb == std::vector<Addr>{"0:{0:1}", "0:{1:1}", "0:{1:2}", "1:1"});
  CHECK(g.ops->mul("0:{0:1}", "0:{0:1}") == "1");
  CHECK(g.ops->mul("0:{0:1}", "1:1") == "0:{0:1}.1:1");
  CHECK(g.ops->inv("0:{1:1}.1:1") == "1:1.0:{1:2}");
  CHECK(g.metric->dist("1", "0:{0:1.1:1}") == 2);
}

TEST_CASE("non-canonical addresses are rejected up front") {
  auto f2 = cayley(spec_of(R"({"kind":"free","rank":2})"));
  CHECK_THROWS_AS(f2.ops->mul("aa'", "1"), SpecError);
  CHECK_THROWS_AS(f2.ops->mul("", "a"), SpecError);
  CHECK_THROWS_AS(f2.ops->mul("xz", "1"), SpecError);

  auto p = cayley(z2z3_spec());
  CHECK_THROWS_AS(p.ops->mul("0:0", "1"), SpecError);     // identity syllable
  CHECK_THROWS_AS(p.ops->mul("0:1.0:1", "1"), SpecError); // non-alternating
  CHECK_THROWS_AS(p.ops->mul("5:1", "1"), SpecError);     // no such factor
  CHECK_THROWS_AS(p.ops->mul("0:2", "1"), SpecError);     // no such element

  auto am = cayley(amalgam_spec());
  CHECK_THROWS_AS(am.ops->mul("A:3", "1"), SpecError);      // not a coset representative
  CHECK_THROWS_AS(am.ops->mul("A:0", "1"), SpecError);
  CHECK_THROWS_AS(am.ops->mul("f:0", "1"), SpecError);
  CHECK_THROWS_AS(am.ops->mul("A:1.A:1", "1"), SpecError);
  CHECK_THROWS_AS(am.ops->mul("f:1.A:1", "1"), SpecError);
  CHECK_THROWS_AS(am.ops->mul("C:1", "1"), SpecError);

  auto h = cayley(hnn_spec());
  CHECK_THROWS_AS(h.ops->mul("t:3", "1"), SpecError);       // not a coset representative
  CHECK_THROWS_AS(h.ops->mul("a:0", "1"), SpecError);
  CHECK_THROWS_AS(h.ops->mul("T:0.t:0", "1"), SpecError);   // reducible pattern
  CHECK_THROWS_AS(h.ops->mul("a:1.t:0", "1"), SpecError);   // trailing part not trailing
  CHECK_THROWS_AS(h.ops->mul("x:1", "1"), SpecError);
}
