#include "qig/main_map.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>

#include "qig/errors.hpp"
#include "qig/product.hpp"
#include "qig/rewire.hpp"

namespace qig {

namespace {

struct LoadedRay {
  std::vector<Addr> rho;
  std::map<Addr, int> idx;

  std::optional<int> index(const Addr& v) const {
    auto it = idx.find(v);
    if (it == idx.end()) return std::nullopt;
    return it->second;
  }
  const Addr& at(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= rho.size())
      throw InternalError("ray index " + std::to_string(i) + " exceeds the loaded depth");
    return rho[static_cast<std::size_t>(i)];
  }
};

LoadedRay load_ray(const LocalGraph& f, int depth) {
  LoadedRay r;
  r.rho.resize(static_cast<std::size_t>(depth) + 1);
  for (int i = 0; i <= depth; ++i) {
    r.rho[static_cast<std::size_t>(i)] = f.ray->step(i);
    if (!r.idx.emplace(r.rho[static_cast<std::size_t>(i)], i).second)
      throw MalformedSpaceError("ray revisits \"" + r.rho[static_cast<std::size_t>(i)] +
                                "\"; it cannot be geodesic");
  }
  if (r.rho[0] != f.basepoint)
    throw MalformedSpaceError("ray does not start at the basepoint of " + f.name);
  return r;
}

// Which rewirings a stage's neighbor oracle serves. Flags accumulate: each
// stage keeps every earlier stage's changes.
struct StageFlags {
  bool rerouted = false;     // pendant child copies hang off their grandparent y copy
  bool restricted = false;   // pendant vertices removed
  bool chain_slid = false;   // re-routed y--y edges slid toward each carrier's basepoint
  bool branch_slid = false;  // x-copy edges inside re-routed copies slid likewise
};

// Shared address algebra for the staged rewiring of free_product_space(plus(x), y).
// All intermediate spaces use that product's address set; they differ only in
// which edges their oracles serve, so every stage is total and uniform (no
// finite patch, hence no boundary artifacts inside any working ball).
struct StageCore {
  LocalGraph x, y, xp, pp, yy;
  Addr x0, y0;
  LoadedRay rx, ry;

  bool plus_copy(const std::vector<PathComp>& comps) const {
    return comps.back().side == 'Y' && comps.back().token == kPendantAddr;
  }
  static bool root_y(const std::vector<PathComp>& comps) {
    return comps.size() == 1 && comps[0].side == 'Y';
  }
  // The y copies whose re-routed children get slid onto their basepoint slot:
  // every y copy except the re-routed ones themselves and the root copy
  // (whose basepoint slot the root pendant block already fills).
  bool chain_carrier(const std::vector<PathComp>& comps) const {
    return comps.back().side == 'Y' && !plus_copy(comps) && !root_y(comps);
  }

  static Addr child_bp(const std::vector<PathComp>& comps, char side, const Addr& token,
                       const Addr& bp) {
    std::vector<PathComp> c = comps;
    c.push_back({side, token});
    return format_tree({std::move(c), bp});
  }
  // Basepoint of the re-routed block hanging at vertex `w` of the y copy `comps`.
  Addr block_bp(const std::vector<PathComp>& comps, const Addr& w) const {
    std::vector<PathComp> c = comps;
    c.push_back({'X', w});
    c.push_back({'Y', kPendantAddr});
    return format_tree({std::move(c), y0});
  }

  // Leaf shift absorbing the pendant: the ray moves one step toward the
  // basepoint and its first vertex becomes the pendant; everything off the
  // ray stays put.
  Addr beta(const Addr& t) const {
    auto i = rx.index(t);
    if (!i || *i == 0) return t;
    return *i == 1 ? Addr(kPendantAddr) : rx.at(*i - 1);
  }
  Addr beta_inv(const Addr& t) const {
    if (t == kPendantAddr) return rx.at(1);
    auto i = rx.index(t);
    if (!i || *i == 0) return t;
    return rx.at(*i + 1);
  }

  // Stage 1: apply the pendant shift to every x-copy leaf and to every attach
  // vertex of a y copy (those live in the x factor).
  Addr lift(const Addr& a) const {
    TreePath p = parse_tree(a);
    for (auto& c : p.comps)
      if (c.side == 'Y' && !c.is_root()) c.token = beta(c.token);
    if (p.comps.back().side == 'X') p.leaf = beta(p.leaf);
    return format_tree(p);
  }
  Addr unlift(const Addr& a) const {
    TreePath p = parse_tree(a);
    for (auto& c : p.comps)
      if (c.side == 'Y' && !c.is_root()) c.token = beta_inv(c.token);
    if (p.comps.back().side == 'X') p.leaf = beta_inv(p.leaf);
    return format_tree(p);
  }

  // Stage 3: undo the leaf shift only (the pendant slot is vacated by the
  // re-routing, so pulling the ray back in restores a bijection onto the
  // pendant-free vertex set). Attach vertices keep their shifted names.
  Addr restrict_fwd(const Addr& a) const {
    TreePath p = parse_tree(a);
    if (p.comps.back().side == 'X') p.leaf = beta_inv(p.leaf);
    return format_tree(p);
  }
  Addr restrict_inv(const Addr& a) const {
    TreePath p = parse_tree(a);
    if (p.comps.back().side == 'X') p.leaf = beta(p.leaf);
    return format_tree(p);
  }

  // Net effect of stages 1-5 on addresses (the slides move edges, not
  // vertices, and stage 3 cancels stage 1 on leaves).
  Addr shift_tokens(const Addr& a, bool forward) const {
    TreePath p = parse_tree(a);
    for (auto& c : p.comps)
      if (c.side == 'Y' && !c.is_root()) c.token = forward ? beta(c.token) : beta_inv(c.token);
    return format_tree(p);
  }

  // Where a re-routed copy's basepoint hangs: off the grandparent y copy at
  // the attach vertex, ray-shifted once the grandparent's edges have slid.
  Addr reroute_up(const std::vector<PathComp>& comps, const StageFlags& f) const {
    const std::size_t k = comps.size();
    if (k == 2) return format_tree({{PathComp{'Y', "-"}}, y0});  // root x copy's pendant block
    std::vector<PathComp> grand(comps.begin(), comps.end() - 2);
    Addr w = comps[k - 2].token;
    if (f.chain_slid && chain_carrier(grand)) {
      if (auto i = ry.index(w); i && *i >= 1) w = ry.at(*i - 1);
    }
    return format_tree({std::move(grand), std::move(w)});
  }

  std::vector<Addr> stage_neighbors(const Addr& a, const StageFlags& f) const {
    TreePath p = parse_tree(a);
    const auto& comps = p.comps;
    std::vector<Addr> out;

    if (comps.back().side == 'X') {
      if (p.leaf == kPendantAddr) {
        if (f.restricted) throw InternalError("removed pendant vertex \"" + a + "\" was queried");
        out.push_back(format_tree({comps, x0}));
        if (!f.rerouted) out.push_back(child_bp(comps, 'Y', kPendantAddr, y0));
        return out;
      }
      for (const Addr& n : xp.neighbors(p.leaf)) {
        if (f.restricted && n == kPendantAddr) continue;
        out.push_back(format_tree({comps, n}));
      }
      if (p.leaf == x0) {
        if (comps.size() == 1) {
          out.push_back(format_tree({{PathComp{'Y', "-"}}, y0}));  // base edge
        } else {
          std::vector<PathComp> parent(comps.begin(), comps.end() - 1);
          Addr w = comps.back().token;
          if (f.branch_slid && plus_copy(parent)) {
            if (auto i = ry.index(w); i && *i >= 1) w = ry.at(*i - 1);
          }
          out.push_back(format_tree({std::move(parent), std::move(w)}));
        }
      } else {
        out.push_back(child_bp(comps, 'Y', p.leaf, y0));
      }
      return out;
    }

    // y-side vertex
    for (const Addr& n : y.neighbors(p.leaf)) out.push_back(format_tree({comps, n}));
    const bool in_plus = plus_copy(comps);
    const bool in_root = root_y(comps);
    const bool slid_here = f.chain_slid && !in_plus && !in_root;

    if (p.leaf == y0) {
      if (in_root) {
        out.push_back(format_tree({{PathComp{'X', "-"}}, x0}));  // base edge
        if (f.rerouted)
          out.push_back(format_tree({{PathComp{'X', "-"}, PathComp{'Y', kPendantAddr}}, y0}));
      } else if (in_plus) {
        if (f.rerouted) {
          out.push_back(reroute_up(comps, f));
        } else {
          std::vector<PathComp> parent(comps.begin(), comps.end() - 1);
          out.push_back(format_tree({std::move(parent), kPendantAddr}));
        }
        if (f.branch_slid) out.push_back(child_bp(comps, 'X', ry.at(1), x0));
      } else {
        std::vector<PathComp> parent(comps.begin(), comps.end() - 1);
        out.push_back(format_tree({std::move(parent), comps.back().token}));
        if (slid_here) out.push_back(block_bp(comps, ry.at(1)));
      }
    } else {
      if (in_plus && f.branch_slid) {
        Addr t = p.leaf;
        if (auto i = ry.index(t); i && *i >= 1) t = ry.at(*i + 1);
        out.push_back(child_bp(comps, 'X', t, x0));
      } else {
        out.push_back(child_bp(comps, 'X', p.leaf, x0));
      }
      if (f.rerouted) {
        Addr v = p.leaf;
        if (slid_here) {
          if (auto i = ry.index(v); i && *i >= 1) v = ry.at(*i + 1);
        }
        out.push_back(block_bp(comps, v));
      }
    }
    return out;
  }

  // Coordinates of a y-side vertex inside its block, read as an address of
  // yy = free_product_space(y, y): the carrier copy is the first root, the
  // re-routed copy slid onto its basepoint is the second, and deeper chain
  // copies keep their attach vertices.
  Addr yy_address(const Addr& v) const {
    TreePath p = parse_tree(v);
    std::vector<PathComp> comps = p.comps;
    std::vector<Addr> hops;  // chain attach vertices, innermost first
    while (comps.back().side == 'Y' && comps.back().token == kPendantAddr) {
      hops.push_back(comps[comps.size() - 2].token);
      comps.erase(comps.end() - 2, comps.end());
      if (comps.empty()) break;
    }
    std::reverse(hops.begin(), hops.end());
    const bool root_block = comps.empty();  // chain rooted at the root x copy's pendant
    std::vector<PathComp> yyc{PathComp{'X', "-"}};
    for (std::size_t j = 0; j < hops.size(); ++j) {
      if (j == 0) {
        if (root_block) {
          yyc.assign(1, PathComp{'Y', "-"});
          continue;
        }
        Addr w = hops[0];
        if (chain_carrier(comps)) {
          if (auto i = ry.index(w); i && *i >= 1) w = ry.at(*i - 1);
        }
        if (w == y0)
          yyc.assign(1, PathComp{'Y', "-"});
        else
          yyc.push_back({'Y', std::move(w)});
      } else {
        yyc.push_back({yyc.back().side == 'X' ? 'Y' : 'X', hops[j]});
      }
    }
    return format_tree({std::move(yyc), p.leaf});
  }
};

// Groups each maximal set of y copies joined by y--y edges into one block;
// x copies keep their own identity. After both slides every vertex lies on
// exactly one cross edge under these labels, which is the tree-of-spaces
// shape of x * (y*y).
struct MasterLabels final : TreeLabels {
  static std::string join(const std::vector<PathComp>& comps) {
    std::string out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (i) out.push_back('/');
      out.push_back(comps[i].side);
      out.push_back('@');
      out += comps[i].is_root() ? "-" : escape_token(comps[i].token);
    }
    return out;
  }

  std::string copy_of(const Addr& v) const override {
    TreePath p = parse_tree(v);
    if (p.comps.back().side == 'X') return join(p.comps);
    std::vector<PathComp> comps = p.comps;
    while (!comps.empty() && comps.back().side == 'Y' && comps.back().token == kPendantAddr)
      comps.erase(comps.end() - 2, comps.end());
    if (comps.empty()) return "Y@-";
    return join(comps);
  }
  char side_of(const Addr& v) const override { return parse_tree(v).comps.back().side; }
  Addr leaf_of(const Addr& v) const override { return parse_tree(v).leaf; }
  bool is_cross(const Addr& u, const Addr& v) const override { return copy_of(u) != copy_of(v); }
};

LocalGraph stage_space(std::shared_ptr<const StageCore> core, const StageFlags& f,
                       std::string name) {
  LocalGraph g;
  g.name = std::move(name);
  g.basepoint = core->pp.basepoint;
  g.valence_bound = core->pp.valence_bound + 1;
  g.is_infinite = true;
  g.neighbors = [core, f](const Addr& a) { return core->stage_neighbors(a, f); };
  g.labels = core->pp.labels;
  return g;
}

// Materializes a total address rewrite as a certified map: forward entries
// from the source ball, inverse entries from the target ball, so totality
// holds on both sides at the full radius.
VertexMap rewrite_map(const LocalGraph& src, const LocalGraph& tgt,
                      const std::function<Addr(const Addr&)>& fwd1,
                      const std::function<Addr(const Addr&)>& inv1, int outer,
                      const std::string& provenance) {
  VertexMap m;
  m.source = src;
  m.target = tgt;
  m.outer_radius = outer;
  m.provenance = {provenance};
  const FiniteBall bs = ball(src, src.basepoint, outer);
  for (const Addr& u : bs.vertices) {
    Addr w = fwd1(u);
    m.forward[u] = w;
    m.inverse[std::move(w)] = u;
  }
  const FiniteBall bt = ball(tgt, tgt.basepoint, outer);
  for (const Addr& w : bt.vertices) {
    if (m.inverse.count(w)) continue;
    Addr u = inv1(w);
    m.forward[u] = w;
    m.inverse[w] = std::move(u);
  }
  certify(m, bs, bt);
  return m;
}

template <typename Fn>
auto staged(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const HypothesisError& e) {
    throw HypothesisError(std::string(stage) + ": " + e.what());
  } catch (const MalformedSpaceError& e) {
    throw MalformedSpaceError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace

MainMapResult main_map(const LocalGraph& x, const LocalGraph& y, int outer_radius) {
  if (outer_radius < 1) throw SpecError("outer radius must be at least 1");
  if (!x.is_infinite || !x.ray || !y.is_infinite || !y.ray)
    throw HypothesisError(
        "the staged product comparison requires infinite factors with geodesic rays");

  auto core = std::make_shared<StageCore>();
  core->x = x;
  core->y = y;
  core->xp = plus(x);
  core->pp = free_product_space(core->xp, y);
  core->yy = free_product_space(y, y);
  core->x0 = x.basepoint;
  core->y0 = y.basepoint;
  const int depth = outer_radius + 16;
  core->rx = load_ray(x, depth);
  core->ry = load_ray(y, depth);

  LocalGraph source = free_product_space(x, y);
  LocalGraph r1 = stage_space(core, {true, false, false, false}, core->pp.name + "/reroute");
  LocalGraph q1 = stage_space(core, {true, true, false, false}, r1.name + "/restrict");
  LocalGraph q2 = stage_space(core, {true, true, true, false}, q1.name + "/chain-slide");
  LocalGraph q3 = stage_space(core, {true, true, true, true}, q2.name + "/branch-slide/blocks");
  q3.labels = std::make_shared<MasterLabels>();

  VertexMap s1 = staged("pendant lift", [&] {
    return rewrite_map(
        source, core->pp, [&](const Addr& a) { return core->lift(a); },
        [&](const Addr& a) { return core->unlift(a); }, outer_radius, "pendant lift");
  });
  VertexMap s2 =
      staged("attach rewire", [&] { return identity_map(core->pp, r1, outer_radius, "attach rewire"); });
  VertexMap s3 = staged("pendant restrict", [&] {
    return rewrite_map(
        r1, q1, [&](const Addr& a) { return core->restrict_fwd(a); },
        [&](const Addr& a) { return core->restrict_inv(a); }, outer_radius, "pendant restrict");
  });
  VertexMap s4 = staged("chain slide", [&] { return identity_map(q1, q2, outer_radius, "chain slide"); });
  VertexMap s5 = staged("branch slide", [&] { return identity_map(q2, q3, outer_radius, "branch slide"); });

  // Identification with x * (y*y), walked at an enlarged radius so the
  // composite below stays total out to outer_radius on both sides.
  const int work = outer_radius + 3;
  const FiniteBall b6 = staged("identify", [&] { return ball(q3, q3.basepoint, work); });

  // Cross-check the block coordinates against the actual slid edges: every
  // y--y edge between two product copies must join yy-adjacent coordinates
  // inside one block.
  if (core->yy.metric) {
    staged("identify", [&]() -> int {
      for (const auto& [u, v] : b6.edges) {
        TreePath pu = parse_tree(u), pv = parse_tree(v);
        if (pu.comps.back().side != 'Y' || pv.comps.back().side != 'Y') continue;
        if (pu.comps == pv.comps) continue;  // factor edge inside one copy
        if (q3.labels->is_cross(u, v))
          throw InternalError("edge (" + u + ", " + v + ") joins two different blocks");
        if (core->yy.metric->dist(core->yy_address(u), core->yy_address(v)) != 1)
          throw InternalError("block coordinates do not preserve the edge (" + u + ", " + v + ")");
      }
      return 0;
    });
  }

  CopyIdent ident_y = [core](const Addr& v, const Addr&) { return core->yy_address(v); };
  VertexMap s6 = staged("identify", [&] {
    return invariance_map(q3, {q3.basepoint, format_tree({{PathComp{'Y', "-"}}, core->y0})}, x,
                          core->yy, work, nullptr, ident_y, &b6);
  });

  // End-to-end composite: stages 1-5 act on addresses in closed form, stage 6
  // is the materialized identification, so the composite is materialized
  // directly from both end balls and certified against the exact metrics.
  VertexMap comp;
  comp.source = source;
  comp.target = s6.target;
  comp.outer_radius = outer_radius;
  comp.provenance = {"pendant lift", "attach rewire", "pendant restrict",
                     "chain slide",  "branch slide",  "identify"};
  const FiniteBall bs = ball(source, source.basepoint, outer_radius);
  for (const Addr& u : bs.vertices) {
    auto it = s6.forward.find(core->shift_tokens(u, true));
    if (it == s6.forward.end()) continue;
    comp.forward[u] = it->second;
    comp.inverse[it->second] = u;
  }
  const FiniteBall bt = ball(comp.target, comp.target.basepoint, outer_radius);
  for (const Addr& w : bt.vertices) {
    if (comp.inverse.count(w)) continue;
    auto it = s6.inverse.find(w);
    if (it == s6.inverse.end()) continue;
    Addr u = core->shift_tokens(it->second, false);
    comp.inverse[w] = u;
    if (!comp.forward.count(u)) comp.forward[u] = w;
  }
  certify(comp, bs, bt);

  MainMapResult res;
  res.source = std::move(source);
  res.target = s6.target;
  res.map = std::move(comp);
  res.stages.reserve(6);
  res.stages.push_back({"pendant lift", core->pp, std::move(s1)});
  res.stages.push_back({"attach rewire", std::move(r1), std::move(s2)});
  res.stages.push_back({"pendant restrict", std::move(q1), std::move(s3)});
  res.stages.push_back({"chain slide", std::move(q2), std::move(s4)});
  res.stages.push_back({"branch slide", std::move(q3), std::move(s5)});
  res.stages.push_back({"identify", res.target, std::move(s6)});
  return res;
}

}  // namespace qig
