#include "qig/rewire.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <set>

#include "qig/errors.hpp"
#include "qig/product.hpp"

namespace qig {

namespace {

std::string edge_str(const Addr& u, const Addr& v) { return "{\"" + u + "\", \"" + v + "\"}"; }

}  // namespace

LocalGraph patch_edges(const LocalGraph& base, const RewirePlan& plan,
                       const std::string& name_suffix) {
  auto del = std::make_shared<std::map<Addr, std::vector<Addr>>>();
  auto ins = std::make_shared<std::map<Addr, std::vector<Addr>>>();
  auto record = [](std::map<Addr, std::vector<Addr>>& side, const Addr& u, const Addr& v,
                   const char* verb) {
    if (u == v) throw HypothesisError(std::string("rewire plan ") + verb + "s a self-loop at \"" + u + "\"");
    auto& lst = side[u];
    if (std::find(lst.begin(), lst.end(), v) != lst.end())
      throw HypothesisError(std::string("rewire plan ") + verb + "s the edge " + edge_str(u, v) + " twice");
    lst.push_back(v);
  };
  for (const auto& [u, v] : plan.deletions) {
    record(*del, u, v, "delete");
    record(*del, v, u, "delete");
  }
  std::size_t max_ins = 0;
  for (const auto& [u, v] : plan.insertions) {
    record(*ins, u, v, "insert");
    record(*ins, v, u, "insert");
  }
  for (const auto& [u, lst] : *ins) max_ins = std::max(max_ins, lst.size());

  LocalGraph g;
  g.name = base.name + name_suffix;
  g.basepoint = base.basepoint;
  g.valence_bound = base.valence_bound + static_cast<int>(max_ins);
  g.is_infinite = base.is_infinite;
  g.labels = base.labels;
  g.ops = base.ops;
  // metric, moves, and ray are dropped: edge rewiring invalidates them.
  auto base_nb = base.neighbors;
  g.neighbors = [base_nb, del, ins](const Addr& v) {
    std::vector<Addr> out = base_nb(v);
    auto d = del->find(v);
    if (d != del->end()) {
      for (const Addr& w : d->second) {
        auto it = std::find(out.begin(), out.end(), w);
        if (it == out.end())
          throw HypothesisError("rewire plan deletes a non-existent edge " + edge_str(v, w));
        out.erase(it);
      }
    }
    auto i = ins->find(v);
    if (i != ins->end()) {
      for (const Addr& w : i->second) {
        if (std::find(out.begin(), out.end(), w) != out.end())
          throw HypothesisError("rewire plan inserts an already-present edge " + edge_str(v, w));
        out.push_back(w);
      }
    }
    return out;
  };
  return g;
}

LocalGraph drop_vertices(const LocalGraph& base, std::function<bool(const Addr&)> keep,
                         const std::string& name_suffix) {
  if (!keep(base.basepoint))
    throw HypothesisError("vertex restriction would remove the basepoint \"" + base.basepoint + "\"");
  LocalGraph g;
  g.name = base.name + name_suffix;
  g.basepoint = base.basepoint;
  g.valence_bound = base.valence_bound;
  g.is_infinite = base.is_infinite;
  g.labels = base.labels;
  g.ops = base.ops;
  auto base_nb = base.neighbors;
  g.neighbors = [base_nb, keep](const Addr& v) {
    if (!keep(v)) return std::vector<Addr>{};
    std::vector<Addr> out;
    for (Addr& w : base_nb(v))
      if (keep(w)) out.push_back(std::move(w));
    return out;
  };
  return g;
}

DecompositionReport check_tree_decomposition(const LocalGraph& z, const FiniteBall& b) {
  if (!z.labels) return {false, "the space carries no copy labels"};
  const TreeLabels& L = *z.labels;

  // Copy labels partition the space: every edge's cross flag must agree with
  // its endpoints' copy assignment, and cross edges change side.
  for (const auto& [u, v] : b.edges) {
    bool cross = L.is_cross(u, v);
    if (cross != (L.copy_of(u) != L.copy_of(v)))
      return {false, "copy labels do not split the space into disjoint subgraphs: edge " +
                         edge_str(u, v) + " disagrees with its cross flag"};
    if (cross && L.side_of(u) == L.side_of(v))
      return {false, "a cross edge joins two copies on the same side: " + edge_str(u, v)};
  }

  // The copy-adjacency quotient is a tree: no cycles, no doubled edges.
  std::map<std::string, std::string> parent;
  std::function<std::string(std::string)> find = [&](std::string a) {
    while (true) {
      auto it = parent.find(a);
      if (it == parent.end() || it->second == a) return a;
      a = it->second;
    }
  };
  for (const auto& [u, v] : b.edges) {
    if (!L.is_cross(u, v)) continue;
    std::string a = find(L.copy_of(u)), c = find(L.copy_of(v));
    if (a == c) return {false, "quotient not a tree"};
    parent[a] = c;
  }

  // Every interior vertex lies on exactly one cross edge.  Vertices on the
  // ball boundary are skipped: their edges are not all materialized.
  std::map<Addr, int> cross_count;
  for (const auto& [u, v] : b.edges) {
    if (!L.is_cross(u, v)) continue;
    ++cross_count[u];
    ++cross_count[v];
  }
  for (const Addr& v : b.vertices) {
    if (b.dist.at(v) > b.radius - 1) continue;
    auto it = cross_count.find(v);
    int c = it == cross_count.end() ? 0 : it->second;
    if (c != 1)
      return {false, "vertex \"" + v + "\" lies on " + std::to_string(c) +
                         " cross edges (expected exactly one)"};
  }
  return {};
}

SlideResult slide_edges(const LocalGraph& space, std::function<Addr(std::int64_t)> ray,
                        const EdgeSelector& selector, int outer_radius) {
  const FiniteBall b = ball(space, space.basepoint, outer_radius);
  RewirePlan plan;
  std::int64_t misses = 0;
  Addr prev = ray(0);
  for (std::int64_t i = 1; i <= outer_radius; ++i) {
    Addr p = ray(i);
    if (!b.contains(p)) break;
    std::vector<Addr> cands = selector(p, i);
    if (cands.size() > 1)
      throw HypothesisError("edge slide selector is ambiguous at ray step " + std::to_string(i) +
                            " (" + std::to_string(cands.size()) + " candidates)");
    if (cands.empty()) {
      ++misses;
    } else {
      plan.deletions.emplace_back(p, cands[0]);
      plan.insertions.emplace_back(prev, cands[0]);
    }
    prev = p;
  }
  if (plan.deletions.empty())
    return {RewirePlan{}, space, identity_map(space, space, outer_radius, "slide (identity)")};
  if (misses > 0)
    throw HypothesisError("edge slide selector matched " + std::to_string(plan.deletions.size()) +
                          " ray steps but missed " + std::to_string(misses) +
                          " others inside the working ball");
  LocalGraph out = patch_edges(space, plan, "/slid");
  VertexMap m = identity_map(space, out, outer_radius, "slide");
  return {std::move(plan), std::move(out), std::move(m)};
}

VertexMap plus_map(const LocalGraph& x, int outer_radius) {
  if (!x.is_infinite || !x.ray)
    throw HypothesisError("the pendant comparison map requires infinite space with a geodesic ray");
  const int depth = outer_radius + 6;
  std::vector<Addr> rho(static_cast<std::size_t>(depth) + 1);
  std::map<Addr, int> idx;
  for (int i = 0; i <= depth; ++i) {
    rho[i] = x.ray->step(i);
    if (!idx.emplace(rho[i], i).second)
      throw MalformedSpaceError("ray revisits \"" + rho[i] + "\"; it cannot be geodesic");
  }
  if (rho[0] != x.basepoint)
    throw MalformedSpaceError("ray does not start at the basepoint of " + x.name);

  VertexMap m;
  m.source = x;
  m.target = plus(x);
  m.outer_radius = outer_radius;
  m.provenance = {"pendant comparison"};
  auto fwd1 = [&](const Addr& u) -> Addr {
    auto it = idx.find(u);
    if (it == idx.end()) return u;
    return it->second == 0 ? Addr(kPendantAddr) : rho[it->second - 1];
  };
  const FiniteBall src = ball(x, x.basepoint, outer_radius);
  for (const Addr& u : src.vertices) {
    Addr w = fwd1(u);
    m.forward[u] = w;
    m.inverse[w] = u;
  }
  const FiniteBall tgt = ball(m.target, m.target.basepoint, outer_radius);
  for (const Addr& w : tgt.vertices) {
    if (m.inverse.count(w)) continue;
    Addr u;
    if (w == kPendantAddr) {
      u = rho[0];
    } else {
      auto it = idx.find(w);
      u = it == idx.end() ? w : rho[it->second + 1];
    }
    m.inverse[w] = u;
    m.forward[u] = w;
  }
  certify(m, src, tgt);
  return m;
}

namespace {

CopyIdent default_ident(const LocalGraph& factor, std::shared_ptr<const TreeLabels> labels) {
  return [factor, labels](const Addr& v, const Addr& anchor) -> Addr {
    Addr lv = labels->leaf_of(v);
    Addr la = labels->leaf_of(anchor);
    if (la == factor.basepoint) return lv;
    if (factor.moves) return factor.moves->to_basepoint(la, lv);
    throw HypothesisError("no identification available: copy anchored away from the basepoint of " +
                          factor.name + ", which carries no translations");
  };
}

}  // namespace

VertexMap invariance_map(const LocalGraph& z, const std::pair<Addr, Addr>& designated_edge,
                         const LocalGraph& x, const LocalGraph& y, int outer_radius,
                         CopyIdent ident_x, CopyIdent ident_y, const FiniteBall* prebuilt) {
  if (!z.labels)
    throw HypothesisError("the space carries no copy labels to read a decomposition from");
  const auto labels = z.labels;
  const FiniteBall b = prebuilt ? *prebuilt : ball(z, z.basepoint, outer_radius);
  DecompositionReport rep = check_tree_decomposition(z, b);
  if (!rep.ok) throw HypothesisError(rep.diagnostic);

  const auto& [zx, zy] = designated_edge;
  if (!b.contains(zx) || !b.contains(zy))
    throw HypothesisError("designated edge endpoint outside the working ball");
  if (!labels->is_cross(zx, zy))
    throw HypothesisError("designated edge " + edge_str(zx, zy) + " is not a cross edge");
  const char sx = labels->side_of(zx);
  if (!ident_x) ident_x = default_ident(x, labels);
  if (!ident_y) ident_y = default_ident(y, labels);

  // Ball-local copy membership (BFS order) and cross adjacency.
  std::map<std::string, std::vector<Addr>> members;
  for (const Addr& v : b.vertices) members[labels->copy_of(v)].push_back(v);
  std::map<Addr, std::vector<Addr>> cross_nb;
  for (const auto& [u, v] : b.edges) {
    if (!labels->is_cross(u, v)) continue;
    cross_nb[u].push_back(v);
    cross_nb[v].push_back(u);
  }

  VertexMap m;
  m.source = z;
  m.target = free_product_space(x, y);
  m.outer_radius = outer_radius;
  m.provenance = {"decomposition identification"};

  struct Pending {
    std::string copy;
    std::vector<PathComp> prefix;
    Addr anchor;
  };
  std::deque<Pending> queue;
  std::set<std::string> visited;
  queue.push_back({labels->copy_of(zx), {{'X', "-"}}, zx});
  queue.push_back({labels->copy_of(zy), {{'Y', "-"}}, zy});
  visited.insert(queue[0].copy);
  visited.insert(queue[1].copy);

  while (!queue.empty()) {
    Pending cur = std::move(queue.front());
    queue.pop_front();
    const char target_side = cur.prefix.back().side;
    const bool on_x = labels->side_of(cur.anchor) == sx;
    const LocalGraph& factor = on_x ? x : y;
    const CopyIdent& ident = on_x ? ident_x : ident_y;
    if (ident(cur.anchor, cur.anchor) != factor.basepoint)
      throw HypothesisError("copy identification does not send the anchor \"" + cur.anchor +
                            "\" to the basepoint of " + factor.name);
    for (const Addr& v : members[cur.copy]) {
      Addr leaf = ident(v, cur.anchor);
      Addr image = format_tree({cur.prefix, leaf});
      m.forward[v] = image;
      auto [it, fresh] = m.inverse.emplace(image, v);
      if (!fresh && it->second != v)
        throw HypothesisError("copy identification is not injective on copy \"" + cur.copy +
                              "\": \"" + it->second + "\" and \"" + v + "\" both land on \"" +
                              image + "\"");
      auto cit = cross_nb.find(v);
      if (cit == cross_nb.end()) continue;
      for (const Addr& w : cit->second) {
        std::string wc = labels->copy_of(w);
        if (visited.count(wc)) continue;
        if (leaf == factor.basepoint)
          throw HypothesisError("a child copy attaches at \"" + v +
                                "\", which the identification sends to the factor basepoint");
        visited.insert(wc);
        std::vector<PathComp> child_prefix = cur.prefix;
        child_prefix.push_back({target_side == 'X' ? 'Y' : 'X', leaf});
        queue.push_back({std::move(wc), std::move(child_prefix), w});
      }
    }
  }
  certify(m, b, ball(m.target, m.target.basepoint, m.outer_radius));
  return m;
}

namespace {

// One side of a product, cut at the base edge: keeps exactly the vertices
// whose root copy is `side`.  The exact metric restricts (the cut edge never
// lies on a geodesic between same-side vertices).
LocalGraph half_space(const LocalGraph& p, char side, const Addr& bp) {
  LocalGraph g;
  g.name = p.name + "/half" + side;
  g.basepoint = bp;
  g.valence_bound = p.valence_bound;
  g.is_infinite = p.is_infinite;
  g.metric = p.metric;
  g.labels = p.labels;
  auto nb = p.neighbors;
  g.neighbors = [nb, side](const Addr& v) {
    std::vector<Addr> out;
    for (Addr& w : nb(v))
      if (!w.empty() && w[0] == side) out.push_back(std::move(w));
    return out;
  };
  return g;
}

}  // namespace

VertexMap wedge_split_map(const LocalGraph& x, const LocalGraph& y, int outer_radius) {
  if (!x.is_infinite || !x.ray || !y.is_infinite || !y.ray)
    throw HypothesisError(
        "the base-edge split requires infinite space with a ray on both product sides");
  LocalGraph p = free_product_space(x, y);
  const auto labels = p.labels;
  const Addr bx = p.basepoint;
  const Addr by = format_tree({{{'Y', "-"}}, y.basepoint});
  const int work = outer_radius + 2;

  auto cross_selector = [labels](const LocalGraph& h) {
    return [labels, nb = h.neighbors](const Addr& pi, std::int64_t) {
      std::vector<Addr> out;
      for (Addr& w : nb(pi))
        if (labels->is_cross(pi, w)) out.push_back(std::move(w));
      return out;
    };
  };

  LocalGraph hx = half_space(p, 'X', bx);
  auto ray_x = [rx = x.ray](std::int64_t i) {
    return format_tree({{{'X', "-"}}, rx->step(i)});
  };
  SlideResult sx = slide_edges(hx, ray_x, cross_selector(hx), work);
  if (sx.plan.insertions.empty())
    throw InternalError("base-edge split: no child copies found along the X-side ray");
  VertexMap ix = invariance_map(sx.space, {bx, sx.plan.insertions.front().second}, x, y,
                                outer_radius + 1);

  LocalGraph hy = half_space(p, 'Y', by);
  auto ray_y = [ry = y.ray](std::int64_t i) {
    return format_tree({{{'Y', "-"}}, ry->step(i)});
  };
  SlideResult sy = slide_edges(hy, ray_y, cross_selector(hy), work);
  if (sy.plan.insertions.empty())
    throw InternalError("base-edge split: no child copies found along the Y-side ray");
  VertexMap iy = invariance_map(sy.space, {sy.plan.insertions.front().second, by}, x, y,
                                outer_radius + 1);

  VertexMap m;
  m.source = p;
  m.target = wedge(p, p);
  m.outer_radius = outer_radius;
  m.provenance = {"base-edge split", "slide X half", "identify X half", "slide Y half",
                  "identify Y half"};
  auto wrap = [](char side, const Addr& leaf) { return format_tree({{{side, "-"}}, leaf}); };
  for (const auto& [u, t] : ix.forward) m.forward[u] = wrap('X', t);
  for (const auto& [t, u] : ix.inverse) m.inverse[wrap('X', t)] = u;
  for (const auto& [u, t] : iy.forward) m.forward[u] = wrap('Y', t);
  for (const auto& [t, u] : iy.inverse) m.inverse[wrap('Y', t)] = u;
  certify(m);
  return m;
}

}  // namespace qig
