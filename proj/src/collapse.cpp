#include "qig/collapse.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <utility>

#include "qig/errors.hpp"
#include "qig/models.hpp"
#include "qig/product.hpp"
#include "qig/transversal.hpp"

namespace qig {

namespace {

// ---------------------------------------------------------------------------
// transversal_graph

struct TableMetric final : ExactMetric {
  std::map<Addr, std::map<Addr, std::int64_t>> table;
  std::int64_t dist(const Addr& u, const Addr& v) const override {
    auto row = table.find(u);
    if (row == table.end()) throw MalformedSpaceError("metric query off the finite graph: " + u);
    auto cell = row->second.find(v);
    if (cell == row->second.end())
      throw MalformedSpaceError("metric query off the finite graph: " + v);
    return cell->second;
  }
};

std::map<Addr, std::map<Addr, std::int64_t>> all_pairs(
    const std::map<Addr, std::vector<Addr>>& adj) {
  std::map<Addr, std::map<Addr, std::int64_t>> out;
  for (const auto& [src, unused] : adj) {
    (void)unused;
    auto& row = out[src];
    row[src] = 0;
    std::deque<Addr> queue{src};
    while (!queue.empty()) {
      Addr v = queue.front();
      queue.pop_front();
      for (const Addr& w : adj.at(v)) {
        if (row.count(w)) continue;
        row[w] = row[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace

LocalGraph transversal_graph(const FiniteTableData& g, const CosetPartition& part,
                             const std::vector<int>& picks, const std::string& name) {
  const std::size_t k = part.cosets.size();
  if (picks.size() != k)
    throw SpecError("transversal graph: one representative per coset is required");
  for (std::size_t c = 0; c < k; ++c) {
    if (picks[c] < 0 || picks[c] >= g.n() || part.coset_of[picks[c]] != static_cast<int>(c))
      throw SpecError("transversal graph: representative outside its coset");
  }

  // Coset adjacency from the Cayley edges, self-loops dropped.
  std::vector<std::set<int>> coset_adj(k);
  for (int e = 0; e < g.n(); ++e) {
    for (int s : g.gens) {
      const int c1 = part.coset_of[e];
      const int c2 = part.coset_of[g.mul(e, s)];
      if (c1 == c2) continue;
      coset_adj[c1].insert(c2);
      coset_adj[c2].insert(c1);
    }
  }

  auto adj = std::make_shared<std::map<Addr, std::vector<Addr>>>();
  int valence = 1;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<Addr> row;
    for (int other : coset_adj[c]) row.push_back(g.names[picks[other]]);
    std::sort(row.begin(), row.end());
    valence = std::max<int>(valence, static_cast<int>(row.size()));
    (*adj)[g.names[picks[c]]] = std::move(row);
  }

  auto metric = std::make_shared<TableMetric>();
  metric->table = all_pairs(*adj);
  for (const auto& [src, row] : metric->table)
    if (row.size() != k)
      throw InternalError("transversal graph is disconnected at " + src);

  LocalGraph tg;
  tg.name = name;
  tg.basepoint = g.names[picks[part.identity_coset]];
  tg.neighbors = [adj](const Addr& v) {
    auto it = adj->find(v);
    if (it == adj->end()) throw MalformedSpaceError("vertex off the finite graph: " + v);
    return it->second;
  };
  tg.valence_bound = valence;
  tg.is_infinite = false;
  tg.metric = metric;
  return tg;
}

// ---------------------------------------------------------------------------
// hnn_tree_space

namespace {

struct ChainTreeCore {
  std::map<Addr, std::vector<Addr>> adj;                  // base graph adjacency
  std::map<Addr, std::map<Addr, std::int64_t>> base_dist; // base all-pairs table
  Addr t0;                                                // base graph basepoint

  bool is_vertex(const Addr& v) const { return adj.count(v) != 0; }

  TreePath parse(const Addr& a) const {
    std::optional<TreePath> p = try_parse_tree(a);
    if (!p) throw MalformedSpaceError("chain tree: unparseable address " + a);
    if (p->comps.empty() || p->comps[0].side != 'A' || p->comps[0].token != "-")
      throw MalformedSpaceError("chain tree: address must be rooted at A@-: " + a);
    for (std::size_t i = 1; i < p->comps.size(); ++i) {
      const PathComp& c = p->comps[i];
      if (c.side != 'O' && c.side != 'I')
        throw MalformedSpaceError("chain tree: copy side must be O or I: " + a);
      if (!is_vertex(c.token))
        throw MalformedSpaceError("chain tree: unknown attaching vertex in " + a);
      // The basepoint child opposite the arrival direction is the parent copy
      // itself, so that spelling is not a canonical address.
      if (i >= 2 && c.token == t0 && c.side != p->comps[i - 1].side)
        throw MalformedSpaceError("chain tree: non-canonical climb through " + a);
    }
    if (!is_vertex(p->leaf)) throw MalformedSpaceError("chain tree: unknown leaf in " + a);
    return *p;
  }

  std::vector<Addr> neighbors(const Addr& a) const {
    TreePath p = parse(a);
    std::vector<Addr> out;
    for (const Addr& w : adj.at(p.leaf)) {
      TreePath q = p;
      q.leaf = w;
      out.push_back(format_tree(q));
    }
    const char last = p.comps.back().side;
    // Outgoing edge: at the attaching basepoint of an incoming copy it climbs
    // back up; everywhere else it descends into the outgoing copy under the
    // current vertex.
    if (p.leaf == t0 && p.comps.size() >= 2 && last == 'I') {
      TreePath up;
      up.comps.assign(p.comps.begin(), p.comps.end() - 1);
      up.leaf = p.comps.back().token;
      out.push_back(format_tree(up));
    } else {
      TreePath down = p;
      down.comps.push_back(PathComp{'O', p.leaf});
      down.leaf = t0;
      out.push_back(format_tree(down));
    }
    // Incoming edge, mirrored.
    if (p.leaf == t0 && p.comps.size() >= 2 && last == 'O') {
      TreePath up;
      up.comps.assign(p.comps.begin(), p.comps.end() - 1);
      up.leaf = p.comps.back().token;
      out.push_back(format_tree(up));
    } else {
      TreePath down = p;
      down.comps.push_back(PathComp{'I', p.leaf});
      down.leaf = t0;
      out.push_back(format_tree(down));
    }
    return out;
  }

  std::int64_t dist_base(const Addr& u, const Addr& v) const { return base_dist.at(u).at(v); }

  // Every copy meets its parent only through its attaching basepoint, so the
  // climb out of a copy is forced and the metric is exact.
  std::pair<Addr, std::int64_t> climb(const TreePath& p, std::size_t depth) const {
    Addr cur = p.leaf;
    std::int64_t cost = 0;
    for (std::size_t i = p.comps.size(); i > depth; --i) {
      cost += dist_base(cur, t0) + 1;
      cur = p.comps[i - 1].token;
    }
    return {cur, cost};
  }

  std::int64_t dist(const Addr& ua, const Addr& va) const {
    TreePath u = parse(ua), v = parse(va);
    std::size_t k = 0;
    while (k < u.comps.size() && k < v.comps.size() && u.comps[k] == v.comps[k]) ++k;
    auto [cu, costu] = climb(u, k);
    auto [cv, costv] = climb(v, k);
    return costu + costv + dist_base(cu, cv);
  }
};

struct ChainTreeMetric final : ExactMetric {
  std::shared_ptr<const ChainTreeCore> core;
  std::int64_t dist(const Addr& u, const Addr& v) const override { return core->dist(u, v); }
};

struct ChainTreeRay final : RayOracle {
  std::shared_ptr<const ChainTreeCore> core;
  Addr step(std::int64_t n) const override {
    TreePath p;
    p.comps.push_back(PathComp{'A', "-"});
    const char side = n >= 0 ? 'O' : 'I';
    for (std::int64_t i = 0; i < (n >= 0 ? n : -n); ++i)
      p.comps.push_back(PathComp{side, core->t0});
    p.leaf = core->t0;
    return format_tree(p);
  }
};

struct ChainTreeLabels final : TreeLabels {
  std::shared_ptr<const ChainTreeCore> core;
  std::string copy_of(const Addr& v) const override {
    TreePath p = core->parse(v);
    Addr full = format_tree(TreePath{p.comps, core->t0});
    return full.substr(0, full.rfind('#'));
  }
  char side_of(const Addr& v) const override { return core->parse(v).comps.back().side; }
  Addr leaf_of(const Addr& v) const override { return core->parse(v).leaf; }
  bool is_cross(const Addr& u, const Addr& v) const override { return copy_of(u) != copy_of(v); }
};

}  // namespace

LocalGraph hnn_tree_space(const LocalGraph& base) {
  if (base.is_infinite)
    throw HypothesisError("chain tree: the base graph must be finite");

  // Materialize the base graph by expanding balls until the frontier is empty.
  int r = 4;
  FiniteBall b = ball(base, base.basepoint, r);
  while (true) {
    bool frontier = false;
    for (const auto& [v, d] : b.dist)
      if (d == r) frontier = true;
    if (!frontier) break;
    if (r > 4096) throw InternalError("chain tree: base graph failed to close out");
    r *= 2;
    b = ball(base, base.basepoint, r);
  }

  auto core = std::make_shared<ChainTreeCore>();
  core->t0 = base.basepoint;
  for (const Addr& v : b.vertices) core->adj[v] = base.neighbors(v);
  core->base_dist = all_pairs(core->adj);

  auto metric = std::make_shared<ChainTreeMetric>();
  metric->core = core;
  auto ray = std::make_shared<ChainTreeRay>();
  ray->core = core;
  auto labels = std::make_shared<ChainTreeLabels>();
  labels->core = core;

  LocalGraph g;
  g.name = "chaintree(" + (base.name.empty() ? std::string("base") : base.name) + ")";
  g.basepoint = format_tree(TreePath{{PathComp{'A', "-"}}, core->t0});
  g.neighbors = [core](const Addr& v) { return core->neighbors(v); };
  g.valence_bound = base.valence_bound + 2;
  g.is_infinite = true;
  g.metric = metric;
  g.ray = ray;
  g.labels = labels;
  return g;
}

// ---------------------------------------------------------------------------
// amalgam_to_free_map

namespace {

// Rewrites one model address into the collapsed product address (side map
// A->X, B->Y; leaves collapse to their coset representative).
Addr collapse_amalgam_addr(const TreePath& p, const FiniteTableData& ta,
                           const FiniteTableData& tb, const CosetPartition& pa,
                           const CosetPartition& pb) {
  TreePath q = p;
  char side = 'A';
  for (PathComp& c : q.comps) {
    side = c.side;
    c.side = (c.side == 'A') ? 'X' : 'Y';
  }
  const FiniteTableData& tbl = (side == 'A') ? ta : tb;
  const CosetPartition& part = (side == 'A') ? pa : pb;
  q.leaf = tbl.names[part.rep_of[part.coset_of[tbl.index_of(p.leaf)]]];
  return format_tree(q);
}

// The coset-representative section: product address back to the model address
// whose leaf is the representative itself.
Addr amalgam_section_addr(const TreePath& p) {
  TreePath q = p;
  for (PathComp& c : q.comps) c.side = (c.side == 'X') ? 'A' : 'B';
  return format_tree(q);
}

}  // namespace

VertexMap amalgam_to_free_map(const GroupSpec& spec, int outer_radius) {
  if (spec.kind != GroupSpec::Kind::amalgam)
    throw SpecError("amalgam collapse: the group spec must be an amalgam");
  if (outer_radius < 1) throw SpecError("amalgam collapse: outer radius must be >= 1");

  const CosetPartition pa = left_cosets(spec.a_table, spec.embed_a);
  const CosetPartition pb = left_cosets(spec.b_table, spec.embed_b);
  if (pa.cosets.size() == 2 && pb.cosets.size() == 2)
    throw HypothesisError(
        "amalgam collapse: the edge subgroup has index 2 on both sides, which is excluded "
        "(the model is a two-ended chain and carries no branching to collapse onto)");

  LocalGraph model = amalgam_model(spec);
  LocalGraph tga = transversal_graph(spec.a_table, pa, pa.rep_of, "cosets:X");
  LocalGraph tgb = transversal_graph(spec.b_table, pb, pb.rep_of, "cosets:Y");
  LocalGraph target = free_product_space(tga, tgb);

  VertexMap m;
  m.source = model;
  m.target = target;
  m.outer_radius = outer_radius;
  m.section_only = true;
  m.provenance = {"collapse copies to coset points", "merge bundle edges into attaching edges",
                  "coset-representative section"};

  FiniteBall bs = ball(model, model.basepoint, outer_radius);
  FiniteBall bt = ball(target, target.basepoint, outer_radius);
  for (const Addr& u : bs.vertices)
    m.forward[u] = collapse_amalgam_addr(parse_tree(u), spec.a_table, spec.b_table, pa, pb);
  for (const Addr& w : bt.vertices) {
    Addr s = amalgam_section_addr(parse_tree(w));
    m.inverse[w] = s;
    m.forward[s] = w;  // representatives collapse back to their own coset point
  }

  certify(m, bs, bt);
  return m;
}

// ---------------------------------------------------------------------------
// hnn_to_free_map

namespace {

struct HnnCollapse {
  const FiniteTableData& g;
  CosetPartition c1, c2;
  Transversal tv;

  Addr member1(const Addr& name) const {
    return g.names[tv.pick1[c1.coset_of[g.index_of(name)]]];
  }
  Addr member2(const Addr& name) const {
    return g.names[tv.pick2[c2.coset_of[g.index_of(name)]]];
  }
  Addr rep1(const Addr& name) const {
    return g.names[c1.rep_of[c1.coset_of[g.index_of(name)]]];
  }
  Addr rep2(const Addr& name) const {
    return g.names[c2.rep_of[c2.coset_of[g.index_of(name)]]];
  }

  Addr forward(const TreePath& p) const {
    TreePath q = p;
    for (std::size_t i = 1; i < q.comps.size(); ++i)
      q.comps[i].token =
          (q.comps[i].side == 'O') ? member1(q.comps[i].token) : member2(q.comps[i].token);
    q.leaf = member1(p.leaf);
    return format_tree(q);
  }

  Addr section(const TreePath& p) const {
    TreePath q = p;
    for (std::size_t i = 1; i < q.comps.size(); ++i)
      q.comps[i].token = (q.comps[i].side == 'O') ? rep1(q.comps[i].token) : rep2(q.comps[i].token);
    return format_tree(q);  // the leaf already names a group element
  }
};

}  // namespace

VertexMap hnn_to_free_map(const GroupSpec& spec, int outer_radius) {
  if (spec.kind != GroupSpec::Kind::hnn)
    throw SpecError("hnn collapse: the group spec must be an hnn extension");
  if (outer_radius < 1) throw SpecError("hnn collapse: outer radius must be >= 1");

  auto collapse = std::make_shared<HnnCollapse>(
      HnnCollapse{spec.a_table, left_cosets(spec.a_table, spec.embed_a),
                  left_cosets(spec.a_table, spec.embed_b), Transversal{}});
  if (collapse->c1.cosets.size() == 1 && spec.a_table.n() > 1)
    throw HypothesisError(
        "hnn collapse: the edge subgroup is the whole base group, so the copies carry no "
        "coset structure to collapse");
  collapse->tv = hnn_transversal(spec.a_table, collapse->c1, collapse->c2);

  LocalGraph model = hnn_model(spec);
  LocalGraph tg =
      transversal_graph(spec.a_table, collapse->c1, collapse->tv.pick1, "transversal");
  LocalGraph target = hnn_tree_space(tg);

  VertexMap m;
  m.source = model;
  m.target = target;
  m.outer_radius = outer_radius;
  m.section_only = spec.f_table.n() > 1;
  m.provenance = {"simultaneous transversal of both coset partitions",
                  "collapse copies to transversal points", "merge bundle edges into chain edges"};

  FiniteBall bs = ball(model, model.basepoint, outer_radius);
  FiniteBall bt = ball(target, target.basepoint, outer_radius);
  for (const Addr& u : bs.vertices) m.forward[u] = collapse->forward(parse_tree(u));
  for (const Addr& w : bt.vertices) {
    Addr s = collapse->section(parse_tree(w));
    m.inverse[w] = s;
    m.forward[s] = w;
  }

  certify(m, bs, bt);
  return m;
}

}  // namespace qig
