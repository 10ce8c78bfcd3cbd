#include "qig/product.hpp"

#include <algorithm>
#include <memory>

#include <json.hpp>

#include "qig/errors.hpp"

namespace qig {

namespace {

std::string combined_spec(const char* kind, const LocalGraph& x, const LocalGraph* y) {
  if (x.spec_json.empty() || (y && y->spec_json.empty())) return "";
  nlohmann::json j;
  j["kind"] = kind;
  j["x"] = nlohmann::json::parse(x.spec_json);
  if (y) j["y"] = nlohmann::json::parse(y->spec_json);
  return j.dump();
}

// ---------------------------------------------------------------- free product

struct ProductCore {
  LocalGraph x, y;

  const LocalGraph& side(char s) const { return s == 'X' ? x : y; }
  static char other(char s) { return s == 'X' ? 'Y' : 'X'; }

  TreePath parse(const Addr& a) const {
    TreePath p = parse_tree(a);
    if (!p.comps[0].is_root())
      throw SpecError("product address must start at a root copy: \"" + a + "\"");
    for (std::size_t i = 0; i < p.comps.size(); ++i) {
      char s = p.comps[i].side;
      if (s != 'X' && s != 'Y') throw SpecError("unknown side '" + std::string(1, s) +
                                                "' in \"" + a + "\"");
      if (i > 0) {
        if (s != other(p.comps[i - 1].side))
          throw SpecError("copy sides must alternate in \"" + a + "\"");
        if (p.comps[i].is_root())
          throw SpecError("only the first copy may be a root in \"" + a + "\"");
        if (p.comps[i].token == side(p.comps[i - 1].side).basepoint)
          throw SpecError("a copy cannot hang from a basepoint in \"" + a + "\"");
      }
    }
    return p;
  }

  std::vector<Addr> neighbors(const Addr& a) const {
    TreePath p = parse(a);
    const LocalGraph& s = side(p.comps.back().side);
    std::vector<Addr> out;
    for (const Addr& w : s.neighbors(p.leaf)) out.push_back(format_tree({p.comps, w}));
    if (p.leaf == s.basepoint) {
      if (p.comps.size() == 1) {
        char o = other(p.comps[0].side);
        out.push_back(format_tree({{{o, "-"}}, side(o).basepoint}));
      } else {
        TreePath up{{p.comps.begin(), p.comps.end() - 1}, p.comps.back().token};
        out.push_back(format_tree(up));
      }
    } else {
      TreePath down = p;
      down.comps.push_back({other(p.comps.back().side), p.leaf});
      down.leaf = side(down.comps.back().side).basepoint;
      out.push_back(format_tree(down));
    }
    return out;
  }
};

struct ProductMetric final : ExactMetric {
  std::shared_ptr<const ProductCore> core;
  explicit ProductMetric(std::shared_ptr<const ProductCore> c) : core(std::move(c)) {}

  std::int64_t factor_dist(char s, const Addr& u, const Addr& v) const {
    return core->side(s).metric->dist(u, v);
  }

  // Walks from the leaf up to the copy at comps[0..k-1]; returns the total
  // cost and the arrival vertex in that copy.
  std::pair<std::int64_t, Addr> climb(const TreePath& p, std::size_t k) const {
    std::int64_t cost = 0;
    Addr cur = p.leaf;
    for (std::size_t i = p.comps.size(); i-- > k;) {
      char s = p.comps[i].side;
      cost += factor_dist(s, cur, core->side(s).basepoint) + 1;
      cur = p.comps[i].token;
    }
    return {cost, cur};
  }

  std::int64_t dist(const Addr& ua, const Addr& va) const override {
    TreePath u = core->parse(ua), v = core->parse(va);
    if (u.comps[0].side != v.comps[0].side) {
      // Different root copies: both climb home, then cross the base edge.
      auto [cu, au] = climb(u, 1);
      auto [cv, av] = climb(v, 1);
      char su = u.comps[0].side, sv = v.comps[0].side;
      return cu + cv + factor_dist(su, au, core->side(su).basepoint) + 1 +
             factor_dist(sv, core->side(sv).basepoint, av);
    }
    std::size_t k = 0;
    while (k < u.comps.size() && k < v.comps.size() && u.comps[k] == v.comps[k]) ++k;
    if (k == u.comps.size() && k == v.comps.size())
      return factor_dist(u.comps.back().side, u.leaf, v.leaf);
    if (k == u.comps.size()) {
      auto [cv, av] = climb(v, k);
      return cv + factor_dist(u.comps.back().side, av, u.leaf);
    }
    if (k == v.comps.size()) {
      auto [cu, au] = climb(u, k);
      return cu + factor_dist(v.comps.back().side, au, v.leaf);
    }
    auto [cu, au] = climb(u, k);
    auto [cv, av] = climb(v, k);
    return cu + cv + factor_dist(u.comps[k - 1].side, au, av);
  }
};

struct ProductLabels final : TreeLabels {
  std::shared_ptr<const ProductCore> core;
  explicit ProductLabels(std::shared_ptr<const ProductCore> c) : core(std::move(c)) {}

  std::string copy_of(const Addr& v) const override {
    TreePath p = core->parse(v);
    std::string out;
    for (std::size_t i = 0; i < p.comps.size(); ++i) {
      if (i) out.push_back('/');
      out.push_back(p.comps[i].side);
      out.push_back('@');
      out += p.comps[i].is_root() ? "-" : escape_token(p.comps[i].token);
    }
    return out;
  }
  char side_of(const Addr& v) const override { return core->parse(v).comps.back().side; }
  Addr leaf_of(const Addr& v) const override { return core->parse(v).leaf; }
  bool is_cross(const Addr& u, const Addr& v) const override { return copy_of(u) != copy_of(v); }
};

// Lifts the X factor's ray into the root X copy.
struct LiftedRay final : RayOracle {
  std::shared_ptr<const ProductCore> core;
  explicit LiftedRay(std::shared_ptr<const ProductCore> c) : core(std::move(c)) {}
  Addr step(std::int64_t n) const override {
    return format_tree({{{'X', "-"}}, core->x.ray->step(n)});
  }
};

// Basepoint, then across the base edge and out along the Y factor's ray.
struct CrossedRay final : RayOracle {
  std::shared_ptr<const ProductCore> core;
  explicit CrossedRay(std::shared_ptr<const ProductCore> c) : core(std::move(c)) {}
  Addr step(std::int64_t n) const override {
    if (n == 0) return format_tree({{{'X', "-"}}, core->x.basepoint});
    return format_tree({{{'Y', "-"}}, core->y.ray->step(n - 1)});
  }
};

// Both factors finite but non-trivial: descend the copy tree, alternating a
// fixed basepoint-neighbor of each factor. Two steps per level (one factor
// edge, one cross edge), so the path is geodesic.
struct DescentRay final : RayOracle {
  std::shared_ptr<const ProductCore> core;
  Addr branch_x, branch_y;  // address-least basepoint neighbors
  DescentRay(std::shared_ptr<const ProductCore> c, Addr bx, Addr by)
      : core(std::move(c)), branch_x(std::move(bx)), branch_y(std::move(by)) {}
  Addr step(std::int64_t n) const override {
    TreePath p{{{'X', "-"}}, ""};
    std::int64_t depth = n / 2;
    for (std::int64_t i = 0; i < depth; ++i) {
      char parent = p.comps.back().side;
      p.comps.push_back({ProductCore::other(parent), parent == 'X' ? branch_x : branch_y});
    }
    char s = p.comps.back().side;
    p.leaf = n % 2 == 0 ? core->side(s).basepoint : (s == 'X' ? branch_x : branch_y);
    return format_tree(p);
  }
};

// ---------------------------------------------------------------------- wedge

struct WedgeCore {
  LocalGraph x, y;

  // Validates a wedge address and returns (side, leaf).
  std::pair<char, Addr> parse(const Addr& a) const {
    TreePath p = parse_tree(a);
    if (p.comps.size() != 1 || !p.comps[0].is_root() ||
        (p.comps[0].side != 'X' && p.comps[0].side != 'Y'))
      throw SpecError("not a wedge address: \"" + a + "\"");
    return {p.comps[0].side, p.leaf};
  }

  static Addr wrap(char s, const Addr& leaf) { return format_tree({{{s, "-"}}, leaf}); }

  std::vector<Addr> neighbors(const Addr& a) const {
    auto [s, leaf] = parse(a);
    const LocalGraph& half = s == 'X' ? x : y;
    std::vector<Addr> out;
    for (const Addr& w : half.neighbors(leaf)) out.push_back(wrap(s, w));
    // The joining edge connects the two halves' basepoints.
    if (s == 'X' && leaf == x.basepoint) out.push_back(wrap('Y', y.basepoint));
    if (s == 'Y' && leaf == y.basepoint) out.push_back(wrap('X', x.basepoint));
    return out;
  }
};

struct WedgeMetric final : ExactMetric {
  std::shared_ptr<const WedgeCore> core;
  explicit WedgeMetric(std::shared_ptr<const WedgeCore> c) : core(std::move(c)) {}
  std::int64_t dist(const Addr& ua, const Addr& va) const override {
    auto [su, u] = core->parse(ua);
    auto [sv, v] = core->parse(va);
    if (su == sv) {
      const LocalGraph& half = su == 'X' ? core->x : core->y;
      return half.metric->dist(u, v);
    }
    // Any path between the halves traverses the joining edge.
    const Addr &xu = su == 'X' ? u : v, &yv = su == 'X' ? v : u;
    return core->x.metric->dist(xu, core->x.basepoint) + 1 +
           core->y.metric->dist(core->y.basepoint, yv);
  }
};

struct WedgeLabels final : TreeLabels {
  std::shared_ptr<const WedgeCore> core;
  explicit WedgeLabels(std::shared_ptr<const WedgeCore> c) : core(std::move(c)) {}
  std::string copy_of(const Addr& v) const override {
    return std::string(1, core->parse(v).first) + "@-";
  }
  char side_of(const Addr& v) const override { return core->parse(v).first; }
  Addr leaf_of(const Addr& v) const override { return core->parse(v).second; }
  bool is_cross(const Addr& u, const Addr& v) const override {
    return core->parse(u).first != core->parse(v).first;
  }
};

struct WedgeRay final : RayOracle {
  std::shared_ptr<const WedgeCore> core;
  char s;
  WedgeRay(std::shared_ptr<const WedgeCore> c, char s) : core(std::move(c)), s(s) {}
  Addr step(std::int64_t n) const override {
    if (s == 'X') return WedgeCore::wrap('X', core->x.ray->step(n));
    // Geodesic from the X-side basepoint: cross the joining edge, then follow Y.
    if (n == 0) return WedgeCore::wrap('X', core->x.basepoint);
    return WedgeCore::wrap('Y', core->y.ray->step(n - 1));
  }
};

// ----------------------------------------------------------------------- plus

struct PlusMetric final : ExactMetric {
  LocalGraph x;
  explicit PlusMetric(LocalGraph x) : x(std::move(x)) {}
  std::int64_t dist(const Addr& u, const Addr& v) const override {
    if (u == kPendantAddr && v == kPendantAddr) return 0;
    if (u == kPendantAddr) return 1 + x.metric->dist(x.basepoint, v);
    if (v == kPendantAddr) return x.metric->dist(u, x.basepoint) + 1;
    return x.metric->dist(u, v);
  }
};

}  // namespace

LocalGraph free_product_space(const LocalGraph& x, const LocalGraph& y) {
  auto core = std::make_shared<ProductCore>();
  core->x = x;
  core->y = y;

  LocalGraph g;
  g.name = "(" + x.name + ")*(" + y.name + ")";
  g.basepoint = format_tree({{{'X', "-"}}, x.basepoint});
  g.valence_bound = std::max(x.valence_bound, y.valence_bound) + 1;
  bool x_nontrivial = !x.neighbors(x.basepoint).empty();
  bool y_nontrivial = !y.neighbors(y.basepoint).empty();
  g.is_infinite = x.is_infinite || y.is_infinite || (x_nontrivial && y_nontrivial);
  g.neighbors = [core](const Addr& v) { return core->neighbors(v); };
  if (x.metric && y.metric) g.metric = std::make_shared<ProductMetric>(core);
  g.labels = std::make_shared<ProductLabels>(core);
  if (x.ray)
    g.ray = std::make_shared<LiftedRay>(core);
  else if (y.ray)
    g.ray = std::make_shared<CrossedRay>(core);
  else if (x_nontrivial && y_nontrivial) {
    auto nx = x.neighbors(x.basepoint);
    auto ny = y.neighbors(y.basepoint);
    g.ray = std::make_shared<DescentRay>(core, *std::min_element(nx.begin(), nx.end()),
                                         *std::min_element(ny.begin(), ny.end()));
  }
  g.spec_json = combined_spec("space_free_product", x, &y);
  return g;
}

LocalGraph wedge(const LocalGraph& x, const LocalGraph& y) {
  auto core = std::make_shared<WedgeCore>();
  core->x = x;
  core->y = y;

  LocalGraph g;
  g.name = "wedge(" + x.name + "," + y.name + ")";
  g.basepoint = WedgeCore::wrap('X', x.basepoint);
  g.valence_bound = std::max(x.valence_bound, y.valence_bound) + 1;
  g.is_infinite = x.is_infinite || y.is_infinite;
  g.neighbors = [core](const Addr& v) { return core->neighbors(v); };
  if (x.metric && y.metric) g.metric = std::make_shared<WedgeMetric>(core);
  g.labels = std::make_shared<WedgeLabels>(core);
  if (x.ray)
    g.ray = std::make_shared<WedgeRay>(core, 'X');
  else if (y.ray)
    g.ray = std::make_shared<WedgeRay>(core, 'Y');
  g.spec_json = combined_spec("wedge", x, &y);
  return g;
}

LocalGraph plus(const LocalGraph& x) {
  LocalGraph g;
  g.name = "(" + x.name + ")+";
  g.basepoint = x.basepoint;
  g.valence_bound = x.valence_bound + 1;
  g.is_infinite = x.is_infinite;
  LocalGraph base = x;
  g.neighbors = [base](const Addr& v) -> std::vector<Addr> {
    if (v == kPendantAddr) return {base.basepoint};
    auto out = base.neighbors(v);
    if (v == base.basepoint) out.push_back(kPendantAddr);
    return out;
  };
  if (x.metric) g.metric = std::make_shared<PlusMetric>(x);
  g.ray = x.ray;  // distances from the basepoint are unchanged
  g.spec_json = combined_spec("plus", x, nullptr);
  return g;
}

}  // namespace qig
