#include "qig/metrics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qig/errors.hpp"

namespace qig {

namespace {

std::int64_t checked_distance(const LocalGraph& space, const Addr& u, const Addr& v,
                              std::int64_t cap) {
  std::optional<std::int64_t> d = distance(space, u, v, cap);
  if (!d)
    throw InternalError("distortion: distance between " + u + " and " + v +
                        " exceeded the measuring cap");
  return *d;
}

std::int64_t ceil_rational(const Rational& r) {
  if (r <= 0) return 0;
  return (r.numerator() + r.denominator() - 1) / r.denominator();
}

}  // namespace

DistortionReport distortion(const VertexMap& m) {
  if (m.inner_radius < 0) throw SpecError("distortion: the map has not been certified");
  const int inner = m.inner_radius;
  const std::int64_t cap = 4 * static_cast<std::int64_t>(inner) + 8;

  DistortionReport rep;
  rep.inner_radius = inner;
  rep.outer_radius = m.outer_radius;
  rep.section_half = m.section_only;

  // Collect the measured pairs, collapsed to distance classes (ds, dt) with
  // one witness pair each; every fit below only depends on the classes.
  std::map<std::pair<std::int64_t, std::int64_t>, std::array<Addr, 2>> classes;
  std::vector<Addr> src_side, tgt_side;  // aligned: tgt_side[i] = image of src_side[i]
  if (!m.section_only) {
    FiniteBall bs = ball(m.source, m.source.basepoint, inner);
    std::map<Addr, Addr> seen;
    for (const Addr& u : bs.vertices) {
      auto [it, fresh] = seen.emplace(m.apply(u), u);
      if (!fresh)
        throw HypothesisError("distortion: not a bijection on the certified ball: " +
                              it->second + " and " + u + " share the image " + it->first);
      src_side.push_back(u);
      tgt_side.push_back(it->first);
    }
  } else {
    FiniteBall bt = ball(m.target, m.target.basepoint, inner);
    for (const Addr& w : bt.vertices) {
      src_side.push_back(m.pull(w));
      tgt_side.push_back(w);
    }
  }
  for (std::size_t i = 0; i < src_side.size(); ++i) {
    for (std::size_t j = i + 1; j < src_side.size(); ++j) {
      const std::int64_t ds = checked_distance(m.source, src_side[i], src_side[j], cap);
      const std::int64_t dt = checked_distance(m.target, tgt_side[i], tgt_side[j], cap);
      const std::pair<std::int64_t, std::int64_t> key(ds, dt);
      if (!classes.count(key))
        classes.emplace(key, std::array<Addr, 2>{src_side[i], src_side[j]});
    }
  }
  if (classes.empty()) return rep;  // a single-vertex ball measures nothing

  // Corner fits.
  std::int64_t max_d = 1;
  for (const auto& [key, wit] : classes) {
    const auto [ds, dt] = key;
    if (ds <= 0 || dt <= 0)
      throw InternalError("distortion: a distinct pair measured at distance zero");
    max_d = std::max({max_d, ds, dt});
    const Rational ratio = ds > dt ? Rational(ds, dt) : Rational(dt, ds);
    if (rep.witness_ratio[0].empty() || ratio > rep.l_corner) rep.witness_ratio = wit;
    rep.l_corner = std::max(rep.l_corner, ratio);
    const std::int64_t gap = ds > dt ? ds - dt : dt - ds;
    if (rep.witness_additive[0].empty() || gap > rep.c_corner) rep.witness_additive = wit;
    rep.c_corner = std::max(rep.c_corner, gap);
  }

  // Joint fit: candidate slopes are every reduced fraction p/q >= 1 with
  // p, q bounded by the largest measured distance. Between consecutive
  // candidates no residual crosses an integer, so the exact minimum of
  // L + ceil(worst residual) is attained on the candidate set.
  std::set<Rational> candidates{Rational(1)};
  for (std::int64_t p = 1; p <= max_d; ++p)
    for (std::int64_t q = 1; q <= p; ++q) candidates.insert(Rational(p, q));
  bool first = true;
  Rational best_cost;
  for (const Rational& l : candidates) {
    if (l > rep.l_corner) break;
    Rational worst(0);
    for (const auto& [key, wit] : classes) {
      (void)wit;
      const auto [ds, dt] = key;
      worst = std::max(worst, Rational(dt) - l * Rational(ds));
      worst = std::max(worst, Rational(ds) - l * Rational(dt));
    }
    const std::int64_t c = ceil_rational(worst);
    const Rational cost = l + Rational(c);
    if (first || cost < best_cost) {
      first = false;
      best_cost = cost;
      rep.l_mult = l;
      rep.c_add = c;
    }
  }
  return rep;
}

EndsEstimate ends_estimate(const LocalGraph& space, int r_max) {
  if (r_max < 3) throw SpecError("ends estimate: the horizon must be at least 3 to read a trend");
  FiniteBall b = ball(space, space.basepoint, 2 * r_max);

  EndsEstimate out;
  std::vector<std::size_t> parent(b.vertices.size());
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int r = 1; r <= r_max; ++r) {
    auto in_annulus = [&](const Addr& v) {
      const int d = b.dist.at(v);
      return d >= r && d <= 2 * r;
    };
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    for (const auto& [u, v] : b.edges)
      if (in_annulus(u) && in_annulus(v)) parent[find(b.index.at(u))] = find(b.index.at(v));
    std::set<std::size_t> touching;
    for (const Addr& v : b.vertices)
      if (b.dist.at(v) == 2 * r) touching.insert(find(b.index.at(v)));
    out.counts.emplace_back(r, static_cast<std::int64_t>(touching.size()));
  }

  bool any_zero = false, all_one = true, all_two = true;
  for (const auto& [r, n] : out.counts) {
    (void)r;
    any_zero |= n == 0;
    all_one &= n == 1;
    all_two &= n == 2;
  }
  const std::size_t k = out.counts.size();
  const bool growing = k >= 3 && out.counts[k - 3].second < out.counts[k - 2].second &&
                       out.counts[k - 2].second < out.counts[k - 1].second;
  if (any_zero)
    out.classification = "zero";
  else if (all_one)
    out.classification = "one";
  else if (all_two)
    out.classification = "two";
  else if (growing)
    out.classification = "many";
  else
    out.classification = "inconclusive";
  return out;
}

LocalizationReport localize_vertex_space(const VertexMap& f, const LocalGraph& model) {
  if (!model.labels) throw MalformedSpaceError("localization: the model carries no copy labels");
  if (f.outer_radius < 1) throw SpecError("localization: the map has no materialized scope");
  const int scope = f.outer_radius;
  FiniteBall b = ball(model, model.basepoint, scope);

  std::set<Addr> image;
  for (const auto& [u, w] : f.forward) {
    (void)u;
    if (b.contains(w)) image.insert(w);
  }
  if (image.empty())
    throw HypothesisError("localization: the map's image misses the model's scope ball");

  // The copy quotient, restricted to the scope ball, must be a tree.
  std::map<Addr, std::string> copy_cache;
  for (const Addr& v : b.vertices) copy_cache[v] = model.labels->copy_of(v);
  std::map<std::string, std::set<std::string>> quotient;
  std::map<std::string, std::vector<Addr>> copy_vertices;
  for (const Addr& v : b.vertices) copy_vertices[copy_cache.at(v)].push_back(v);
  for (const auto& [u, v] : b.edges) {
    const std::string &cu = copy_cache.at(u), &cv = copy_cache.at(v);
    if (cu == cv) continue;
    quotient[cu].insert(cv);
    quotient[cv].insert(cu);
  }
  const std::string root = copy_cache.at(model.basepoint);
  std::map<std::string, std::string> tree_parent;
  std::map<std::string, std::vector<std::string>> tree_children;
  std::vector<std::string> order;
  tree_parent[root] = root;
  std::deque<std::string> queue{root};
  while (!queue.empty()) {
    std::string c = queue.front();
    queue.pop_front();
    order.push_back(c);
    for (const std::string& n : quotient[c]) {
      if (tree_parent.count(n)) {
        if (n != tree_parent[c])
          throw MalformedSpaceError("localization: copy quotient is not a tree inside the scope");
        continue;
      }
      tree_parent[n] = c;
      tree_children[c].push_back(n);
      queue.push_back(n);
    }
  }

  // Image weight per copy, then per subtree (children precede parents in
  // reversed BFS order).
  std::map<std::string, std::int64_t> weight, subtree;
  for (const Addr& w : image) ++weight[copy_cache.at(w)];
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::int64_t s = weight[*it];
    for (const std::string& child : tree_children[*it]) s += subtree[child];
    subtree[*it] = s;
  }
  const std::int64_t total = subtree[root];

  LocalizationReport rep;
  for (const std::string& c : order) {
    if (c == root) continue;
    const std::int64_t inside = subtree[c];
    if (inside == 0) continue;  // bundles with no image weight all point rootward
    LocalizationReport::BundleOrientation o;
    o.parent_copy = tree_parent[c];
    o.child_copy = c;
    o.inside = inside;
    o.outside = total - inside;
    o.direction = inside > o.outside ? +1 : (o.outside > inside ? -1 : 0);
    rep.bundles.push_back(o);
  }

  // Majority walk downward from the root.
  std::string cur = root;
  while (true) {
    std::string next;
    bool tie = false;
    for (const std::string& child : tree_children[cur]) {
      const std::int64_t inside = subtree.count(child) ? subtree[child] : 0;
      if (2 * inside > total) next = child;
      if (inside > 0 && 2 * inside == total) tie = true;
    }
    if (tie) return rep;  // evenly split between two sides: nothing located
    if (next.empty()) break;
    bool interior = false;
    for (const Addr& v : copy_vertices[next])
      if (b.dist.at(v) < scope) interior = true;
    if (!interior) {
      rep.contradiction = "orientations descend into " + next +
                          ", which only touches the scope boundary; widen the scope";
      return rep;
    }
    cur = next;
  }
  rep.located_copy = cur;

  // Empirical radius: multi-source BFS from the located copy's vertices.
  std::map<Addr, std::int64_t> dist;
  std::deque<Addr> frontier;
  for (const Addr& v : copy_vertices[cur]) {
    dist[v] = 0;
    frontier.push_back(v);
  }
  std::map<Addr, std::vector<Addr>> adj;
  for (const auto& [u, v] : b.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  while (!frontier.empty()) {
    Addr v = frontier.front();
    frontier.pop_front();
    for (const Addr& w : adj[v]) {
      if (dist.count(w)) continue;
      dist[w] = dist[v] + 1;
      frontier.push_back(w);
    }
  }
  rep.r_emp = 0;
  for (const Addr& w : image) {
    auto it = dist.find(w);
    if (it == dist.end())
      throw InternalError("localization: an image vertex is unreachable inside the scope ball");
    rep.r_emp = std::max(rep.r_emp, it->second);
  }
  return rep;
}

}  // namespace qig
