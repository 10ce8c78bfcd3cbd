#include "qig/models.hpp"

#include <algorithm>
#include <memory>

#include <json.hpp>

#include "qig/errors.hpp"
#include "qig/groups.hpp"
#include "qig/product.hpp"

namespace qig {

namespace {

// Deterministic shortest path in a finite Cayley graph: walk back from `to`
// choosing the address-least predecessor each step.
std::vector<Addr> least_geodesic(const LocalGraph& cay, const Addr& from, const Addr& to) {
  std::vector<Addr> rev{to};
  Addr cur = to;
  while (cur != from) {
    std::int64_t dcur = cay.metric->dist(from, cur);
    Addr best;
    for (const Addr& w : cay.neighbors(cur))
      if (cay.metric->dist(from, w) == dcur - 1 && (best.empty() || w < best)) best = w;
    if (best.empty()) throw InternalError("no geodesic predecessor");
    rev.push_back(best);
    cur = best;
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

struct ModelLabels final : TreeLabels {
  std::function<TreePath(const Addr&)> parse;
  explicit ModelLabels(std::function<TreePath(const Addr&)> p) : parse(std::move(p)) {}
  std::string copy_of(const Addr& v) const override {
    TreePath p = parse(v);
    std::string out;
    for (std::size_t i = 0; i < p.comps.size(); ++i) {
      if (i) out.push_back('/');
      out.push_back(p.comps[i].side);
      out.push_back('@');
      out += p.comps[i].is_root() ? "-" : escape_token(p.comps[i].token);
    }
    return out;
  }
  char side_of(const Addr& v) const override { return parse(v).comps.back().side; }
  Addr leaf_of(const Addr& v) const override { return parse(v).leaf; }
  bool is_cross(const Addr& u, const Addr& v) const override { return copy_of(u) != copy_of(v); }
};

// ------------------------------------------------------------- amalgam model

struct AmalgamCore {
  FiniteTableData ta, tb, tf;
  Embedding ea, eb;
  CosetPartition pa, pb;
  LocalGraph cay_a, cay_b;

  const FiniteTableData& tbl(char s) const { return s == 'A' ? ta : tb; }
  const LocalGraph& cay(char s) const { return s == 'A' ? cay_a : cay_b; }
  const CosetPartition& part(char s) const { return s == 'A' ? pa : pb; }
  const Embedding& emb(char s) const { return s == 'A' ? ea : eb; }
  static char other(char s) { return s == 'A' ? 'B' : 'A'; }

  int pull_back(char s, int x) const {
    const auto& im = emb(s).image;
    for (int i = 0; i < tf.n(); ++i)
      if (im[i] == x) return i;
    throw InternalError("element not in edge-group image");
  }

  TreePath parse(const Addr& a) const {
    TreePath p = parse_tree(a);
    if (!p.comps[0].is_root() || (p.comps[0].side != 'A' && p.comps[0].side != 'B'))
      throw SpecError("model address must start at root copy A@- or B@-: \"" + a + "\"");
    for (std::size_t i = 1; i < p.comps.size(); ++i) {
      char parent = p.comps[i - 1].side;
      if (p.comps[i].side != other(parent))
        throw SpecError("copy sides must alternate in \"" + a + "\"");
      if (p.comps[i].is_root())
        throw SpecError("only the first copy may be a root in \"" + a + "\"");
      const auto& pt = tbl(parent);
      int idx = pt.index_of(p.comps[i].token);
      if (idx == pt.identity || part(parent).rep_of[part(parent).coset_of[idx]] != idx)
        throw SpecError("child token \"" + p.comps[i].token +
                        "\" is not a non-trivial coset representative in \"" + a + "\"");
    }
    return p;
  }

  std::vector<Addr> neighbors(const Addr& a) const {
    TreePath p = parse(a);
    char s = p.comps.back().side, o = other(s);
    std::vector<Addr> out;
    for (const Addr& w : cay(s).neighbors(p.leaf)) out.push_back(format_tree({p.comps, w}));
    // The one cross edge: decompose leaf = rep * phi(fidx) in the side group.
    int x = tbl(s).index_of(p.leaf);
    int rep = part(s).rep_of[part(s).coset_of[x]];
    int fidx = pull_back(s, tbl(s).mul(tbl(s).inv(rep), x));
    if (rep == tbl(s).identity) {
      if (p.comps.size() == 1) {
        out.push_back(format_tree({{{o, "-"}}, tbl(o).names[emb(o).image[fidx]]}));
      } else {
        int t = tbl(o).index_of(p.comps.back().token);
        TreePath up{{p.comps.begin(), p.comps.end() - 1},
                    tbl(o).names[tbl(o).mul(t, emb(o).image[fidx])]};
        out.push_back(format_tree(up));
      }
    } else {
      TreePath down = p;
      down.comps.push_back({o, tbl(s).names[rep]});
      down.leaf = tbl(o).names[emb(o).image[fidx]];
      out.push_back(format_tree(down));
    }
    return out;
  }

  bool no_weave() const {
    for (int f1 = 0; f1 < tf.n(); ++f1)
      for (int f2 = 0; f2 < tf.n(); ++f2) {
        std::int64_t da = cay_a.metric->dist(ta.names[ea.image[f1]], ta.names[ea.image[f2]]);
        std::int64_t db = cay_b.metric->dist(tb.names[eb.image[f1]], tb.names[eb.image[f2]]);
        if (da > 2 + db || db > 2 + da) return false;
      }
    return true;
  }
};

struct AmalgamModelMetric final : ExactMetric {
  std::shared_ptr<const AmalgamCore> core;
  explicit AmalgamModelMetric(std::shared_ptr<const AmalgamCore> c) : core(std::move(c)) {}

  std::int64_t d(char s, const Addr& u, const Addr& v) const {
    return core->cay(s).metric->dist(u, v);
  }

  // Climbs to the copy at comps[0..k-1], tracking the best cost through every
  // bundle door; returns (arrival vertex, cost) candidates in that copy.
  std::vector<std::pair<Addr, std::int64_t>> climb(const TreePath& p, std::size_t k) const {
    std::vector<std::pair<Addr, std::int64_t>> cands{{p.leaf, 0}};
    for (std::size_t i = p.comps.size(); i-- > k;) {
      char s = p.comps[i].side, o = AmalgamCore::other(s);
      int t = core->tbl(o).index_of(p.comps[i].token);
      std::vector<std::pair<Addr, std::int64_t>> next;
      for (int f = 0; f < core->tf.n(); ++f) {
        Addr door = core->tbl(s).names[core->emb(s).image[f]];
        std::int64_t best = -1;
        for (const auto& [v, c] : cands) {
          std::int64_t cost = c + d(s, v, door);
          if (best < 0 || cost < best) best = cost;
        }
        next.push_back({core->tbl(o).names[core->tbl(o).mul(t, core->emb(o).image[f])], best + 1});
      }
      cands = std::move(next);
    }
    return cands;
  }

  std::int64_t dist(const Addr& ua, const Addr& va) const override {
    TreePath u = core->parse(ua), v = core->parse(va);
    if (u.comps[0].side != v.comps[0].side) {
      // Different root copies: meet at the identity bundle between the roots.
      auto cu = climb(u, 1), cv = climb(v, 1);
      char su = u.comps[0].side, sv = v.comps[0].side;
      std::int64_t best = -1;
      for (int f = 0; f < core->tf.n(); ++f) {
        Addr du = core->tbl(su).names[core->emb(su).image[f]];
        Addr dv = core->tbl(sv).names[core->emb(sv).image[f]];
        std::int64_t zu = -1, zv = -1;
        for (const auto& [w, c] : cu)
          if (std::int64_t t = c + d(su, w, du); zu < 0 || t < zu) zu = t;
        for (const auto& [w, c] : cv)
          if (std::int64_t t = c + d(sv, dv, w); zv < 0 || t < zv) zv = t;
        if (std::int64_t t = zu + 1 + zv; best < 0 || t < best) best = t;
      }
      return best;
    }
    std::size_t k = 0;
    while (k < u.comps.size() && k < v.comps.size() && u.comps[k] == v.comps[k]) ++k;
    if (k == u.comps.size() && k == v.comps.size())
      return d(u.comps.back().side, u.leaf, v.leaf);
    if (k == u.comps.size() || k == v.comps.size()) {
      const TreePath& anc = k == u.comps.size() ? u : v;
      const TreePath& deep = k == u.comps.size() ? v : u;
      std::int64_t best = -1;
      for (const auto& [w, c] : climb(deep, k))
        if (std::int64_t t = c + d(anc.comps.back().side, w, anc.leaf); best < 0 || t < best)
          best = t;
      return best;
    }
    auto cu = climb(u, k), cv = climb(v, k);
    char s = u.comps[k - 1].side;
    std::int64_t best = -1;
    for (const auto& [wu, c1] : cu)
      for (const auto& [wv, c2] : cv)
        if (std::int64_t t = c1 + c2 + d(s, wu, wv); best < 0 || t < best) best = t;
    return best;
  }
};

// Periodic descent: a geodesic path to the chosen exit representative inside
// each copy, then one cross edge, alternating sides forever.
struct DescentModelRay final : RayOracle {
  std::shared_ptr<const AmalgamCore> core;
  std::vector<Addr> path_a, path_b;  // identity -> representative, per side
  DescentModelRay(std::shared_ptr<const AmalgamCore> c, std::vector<Addr> pa, std::vector<Addr> pb)
      : core(std::move(c)), path_a(std::move(pa)), path_b(std::move(pb)) {}
  Addr step(std::int64_t n) const override {
    TreePath p{{{'A', "-"}}, ""};
    const std::vector<Addr>* path = &path_a;
    char side = 'A';
    std::int64_t left = n;
    while (true) {
      std::int64_t seg = static_cast<std::int64_t>(path->size()) - 1;
      if (left <= seg) {
        p.leaf = (*path)[static_cast<std::size_t>(left)];
        return format_tree(p);
      }
      left -= seg + 1;
      char o = AmalgamCore::other(side);
      p.comps.push_back({o, path->back()});
      side = o;
      path = side == 'A' ? &path_a : &path_b;
    }
  }
};

// --------------------------------------------------------------- hnn model

struct HnnCore {
  FiniteTableData ta, tf;
  Embedding e1, e2;  // outgoing, incoming
  CosetPartition c1, c2;
  LocalGraph cay;

  int pull_back(const Embedding& e, int x) const {
    for (int i = 0; i < tf.n(); ++i)
      if (e.image[i] == x) return i;
    throw InternalError("element not in edge-group image");
  }

  TreePath parse(const Addr& a) const {
    TreePath p = parse_tree(a);
    if (p.comps[0].side != 'A' || !p.comps[0].is_root())
      throw SpecError("model address must start at root copy A@-: \"" + a + "\"");
    for (std::size_t i = 1; i < p.comps.size(); ++i) {
      char s = p.comps[i].side;
      if (s != 'O' && s != 'I')
        throw SpecError("child copies must be O@ or I@ in \"" + a + "\"");
      if (p.comps[i].is_root())
        throw SpecError("only the first copy may be a root in \"" + a + "\"");
      int idx = ta.index_of(p.comps[i].token);
      const CosetPartition& cp = s == 'O' ? c1 : c2;
      if (cp.rep_of[cp.coset_of[idx]] != idx)
        throw SpecError("child token \"" + p.comps[i].token +
                        "\" is not a coset representative in \"" + a + "\"");
      if (i >= 2 && idx == ta.identity && p.comps[i - 1].side != s)
        throw SpecError("identity child opposite the arrival direction is the parent copy in \"" +
                        a + "\"");
    }
    return p;
  }

  std::vector<Addr> neighbors(const Addr& a) const {
    TreePath p = parse(a);
    std::vector<Addr> out;
    for (const Addr& w : cay.neighbors(p.leaf)) out.push_back(format_tree({p.comps, w}));
    int x = ta.index_of(p.leaf);
    char last = p.comps.back().side;

    // Outgoing bundle: leaf = rep * e1(f); the identity bundle of an I-child
    // leads back up, everything else leads down.
    int r1 = c1.rep_of[c1.coset_of[x]];
    int f1 = pull_back(e1, ta.mul(ta.inv(r1), x));
    if (r1 == ta.identity && last == 'I') {
      int t = ta.index_of(p.comps.back().token);
      TreePath up{{p.comps.begin(), p.comps.end() - 1}, ta.names[ta.mul(t, e2.image[f1])]};
      out.push_back(format_tree(up));
    } else {
      TreePath down = p;
      down.comps.push_back({'O', ta.names[r1]});
      down.leaf = ta.names[e2.image[f1]];
      out.push_back(format_tree(down));
    }

    // Incoming bundle: leaf = rep * e2(f), mirrored.
    int r2 = c2.rep_of[c2.coset_of[x]];
    int f2 = pull_back(e2, ta.mul(ta.inv(r2), x));
    if (r2 == ta.identity && last == 'O') {
      int t = ta.index_of(p.comps.back().token);
      TreePath up{{p.comps.begin(), p.comps.end() - 1}, ta.names[ta.mul(t, e1.image[f2])]};
      out.push_back(format_tree(up));
    } else {
      TreePath down = p;
      down.comps.push_back({'I', ta.names[r2]});
      down.leaf = ta.names[e1.image[f2]];
      out.push_back(format_tree(down));
    }
    return out;
  }

  bool no_weave() const {
    for (int f1 = 0; f1 < tf.n(); ++f1)
      for (int f2 = 0; f2 < tf.n(); ++f2) {
        std::int64_t d1 = cay.metric->dist(ta.names[e1.image[f1]], ta.names[e1.image[f2]]);
        std::int64_t d2 = cay.metric->dist(ta.names[e2.image[f1]], ta.names[e2.image[f2]]);
        if (d1 > 2 + d2 || d2 > 2 + d1) return false;
      }
    return true;
  }
};

struct HnnModelMetric final : ExactMetric {
  std::shared_ptr<const HnnCore> core;
  explicit HnnModelMetric(std::shared_ptr<const HnnCore> c) : core(std::move(c)) {}

  std::int64_t d(const Addr& u, const Addr& v) const { return core->cay.metric->dist(u, v); }

  std::vector<std::pair<Addr, std::int64_t>> climb(const TreePath& p, std::size_t k) const {
    std::vector<std::pair<Addr, std::int64_t>> cands{{p.leaf, 0}};
    for (std::size_t i = p.comps.size(); i-- > k;) {
      bool outgoing = p.comps[i].side == 'O';
      int t = core->ta.index_of(p.comps[i].token);
      const Embedding& child_side = outgoing ? core->e2 : core->e1;
      const Embedding& parent_side = outgoing ? core->e1 : core->e2;
      std::vector<std::pair<Addr, std::int64_t>> next;
      for (int f = 0; f < core->tf.n(); ++f) {
        Addr door = core->ta.names[child_side.image[f]];
        std::int64_t best = -1;
        for (const auto& [v, c] : cands) {
          std::int64_t cost = c + d(v, door);
          if (best < 0 || cost < best) best = cost;
        }
        next.push_back({core->ta.names[core->ta.mul(t, parent_side.image[f])], best + 1});
      }
      cands = std::move(next);
    }
    return cands;
  }

  std::int64_t dist(const Addr& ua, const Addr& va) const override {
    TreePath u = core->parse(ua), v = core->parse(va);
    std::size_t k = 0;
    while (k < u.comps.size() && k < v.comps.size() && u.comps[k] == v.comps[k]) ++k;
    if (k == u.comps.size() && k == v.comps.size()) return d(u.leaf, v.leaf);
    if (k == u.comps.size() || k == v.comps.size()) {
      const TreePath& anc = k == u.comps.size() ? u : v;
      const TreePath& deep = k == u.comps.size() ? v : u;
      std::int64_t best = -1;
      for (const auto& [w, c] : climb(deep, k))
        if (std::int64_t t = c + d(w, anc.leaf); best < 0 || t < best) best = t;
      return best;
    }
    auto cu = climb(u, k), cv = climb(v, k);
    std::int64_t best = -1;
    for (const auto& [wu, c1] : cu)
      for (const auto& [wv, c2] : cv)
        if (std::int64_t t = c1 + c2 + d(wu, wv); best < 0 || t < best) best = t;
    return best;
  }
};

// The stable-letter direction: one cross edge per level through the identity
// bundles, never moving inside a copy. Depth n needs n cross edges, so the
// walk is geodesic.
struct HnnModelRay final : RayOracle {
  Addr id_name;
  explicit HnnModelRay(Addr id) : id_name(std::move(id)) {}
  Addr step(std::int64_t n) const override {
    TreePath p{{{'A', "-"}}, id_name};
    for (std::int64_t i = 0; i < n; ++i) p.comps.push_back({'O', id_name});
    return format_tree(p);
  }
};

}  // namespace

LocalGraph amalgam_model(const GroupSpec& spec) {
  if (spec.kind != GroupSpec::Kind::amalgam)
    throw SpecError("amalgam model requires an amalgam group spec");
  auto core = std::make_shared<AmalgamCore>();
  core->ta = spec.a_table;
  core->tb = spec.b_table;
  core->tf = spec.f_table;
  core->ea = spec.embed_a;
  core->eb = spec.embed_b;
  core->pa = left_cosets(core->ta, core->ea);
  core->pb = left_cosets(core->tb, core->eb);
  GroupSpec ga, gb;
  ga.kind = gb.kind = GroupSpec::Kind::finite_table;
  ga.table = core->ta;
  gb.table = core->tb;
  core->cay_a = cayley(ga);
  core->cay_b = cayley(gb);

  LocalGraph g;
  g.name = "model:" + spec.display_name();
  g.basepoint = format_tree({{{'A', "-"}}, core->ta.names[core->ta.identity]});
  g.valence_bound = std::max(core->cay_a.valence_bound, core->cay_b.valence_bound) + 1;
  g.is_infinite = spec.infinite();
  g.neighbors = [core](const Addr& v) { return core->neighbors(v); };
  g.labels = std::make_shared<ModelLabels>([core](const Addr& v) { return core->parse(v); });
  if (core->no_weave()) {
    g.metric = std::make_shared<AmalgamModelMetric>(core);
    if (g.is_infinite) {
      // Pick, per side, the cheapest non-trivial exit representative; the ray
      // is only sound when its segments meet the per-level lower bound, so
      // verify before attaching.
      auto pick = [&](char s) -> std::optional<std::vector<Addr>> {
        const auto& tbl = core->tbl(s);
        const auto& cayg = core->cay(s);
        Addr id = tbl.names[tbl.identity];
        std::optional<Addr> best;
        std::int64_t best_d = 0;
        for (std::size_t ci = 0; ci < core->part(s).cosets.size(); ++ci) {
          int rep = core->part(s).rep_of[ci];
          if (rep == tbl.identity) continue;
          std::int64_t dd = cayg.metric->dist(id, tbl.names[rep]);
          if (!best || dd < best_d || (dd == best_d && tbl.names[rep] < *best)) {
            best = tbl.names[rep];
            best_d = dd;
          }
        }
        if (!best) return std::nullopt;
        // Per-level optimality: no door pair beats the identity doors.
        for (int f1 = 0; f1 < core->tf.n(); ++f1)
          for (int f2 = 0; f2 < core->tf.n(); ++f2) {
            Addr d1 = tbl.names[core->emb(s).image[f1]];
            Addr d2 = tbl.names[tbl.mul(tbl.index_of(*best), core->emb(s).image[f2])];
            if (cayg.metric->dist(d1, d2) < best_d) return std::nullopt;
          }
        auto path = least_geodesic(cayg, id, *best);
        // Prefix optimality: no other entry door is closer to any path vertex.
        for (std::size_t j = 0; j < path.size(); ++j)
          for (int f = 0; f < core->tf.n(); ++f)
            if (cayg.metric->dist(tbl.names[core->emb(s).image[f]], path[j]) <
                static_cast<std::int64_t>(j))
              return std::nullopt;
        return path;
      };
      auto pa = pick('A'), pb = pick('B');
      if (pa && pb) g.ray = std::make_shared<DescentModelRay>(core, *pa, *pb);
    }
  }
  nlohmann::json j = spec.to_json();
  j["kind"] = "amalgam_model";
  g.spec_json = j.dump();
  return g;
}

LocalGraph hnn_model(const GroupSpec& spec) {
  if (spec.kind != GroupSpec::Kind::hnn)
    throw SpecError("hnn model requires an hnn group spec");
  auto core = std::make_shared<HnnCore>();
  core->ta = spec.a_table;
  core->tf = spec.f_table;
  core->e1 = spec.embed_a;
  core->e2 = spec.embed_b;
  core->c1 = left_cosets(core->ta, core->e1);
  core->c2 = left_cosets(core->ta, core->e2);
  GroupSpec ga;
  ga.kind = GroupSpec::Kind::finite_table;
  ga.table = core->ta;
  core->cay = cayley(ga);

  LocalGraph g;
  g.name = "model:" + spec.display_name();
  g.basepoint = format_tree({{{'A', "-"}}, core->ta.names[core->ta.identity]});
  g.valence_bound = core->cay.valence_bound + 2;
  g.is_infinite = true;
  g.neighbors = [core](const Addr& v) { return core->neighbors(v); };
  g.labels = std::make_shared<ModelLabels>([core](const Addr& v) { return core->parse(v); });
  if (core->no_weave()) g.metric = std::make_shared<HnnModelMetric>(core);
  g.ray = std::make_shared<HnnModelRay>(core->ta.names[core->ta.identity]);
  nlohmann::json j = spec.to_json();
  j["kind"] = "hnn_model";
  g.spec_json = j.dump();
  return g;
}

LocalGraph build_space(const SpaceSpec& spec) {
  switch (spec.kind) {
    case SpaceSpec::Kind::group:
      return cayley(spec.group);
    case SpaceSpec::Kind::free_product:
      return free_product_space(build_space(*spec.x), build_space(*spec.y));
    case SpaceSpec::Kind::wedge:
      return wedge(build_space(*spec.x), build_space(*spec.y));
    case SpaceSpec::Kind::plus:
      return plus(build_space(*spec.x));
    case SpaceSpec::Kind::amalgam_model:
      return amalgam_model(spec.group);
    case SpaceSpec::Kind::hnn_model:
      return hnn_model(spec.group);
  }
  throw InternalError("unreachable");
}

}  // namespace qig
