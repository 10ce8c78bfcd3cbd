#include "qig/pipeline.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qig/errors.hpp"
#include "qig/group_spec.hpp"
#include "qig/net.hpp"
#include "qig/product.hpp"

namespace qig {

namespace {

// C must be declared as a free product of two infinite spaces; the transport
// hangs consolidated copies of it off net points on both sides, which is only
// sound when C itself branches.
void require_infinite_free_product(const LocalGraph& c) {
  const std::string guidance =
      "the common factor must be presented as a free product of two infinite spaces; "
      "pre-compose with the staged product comparison to put it in that form";
  if (c.spec_json.empty()) throw HypothesisError("qi transport: " + guidance);
  nlohmann::json j = nlohmann::json::parse(c.spec_json, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("kind", "") != "space_free_product")
    throw HypothesisError("qi transport: " + guidance);
  SpaceSpec spec = SpaceSpec::from_json(j);
  if (!spec.x || !spec.y || !build_space(*spec.x).is_infinite ||
      !build_space(*spec.y).is_infinite)
    throw HypothesisError("qi transport: " + guidance);
}

// Address rewrite applying the fiber transport tau to every moving-factor
// coordinate: attaching tokens of common-factor copies (side Y) and leaves
// inside moving-factor copies (side X). Returns nothing when a coordinate
// falls outside tau's domain.
std::optional<Addr> rewrite(const TreePath& p, const std::map<Addr, Addr>& tau) {
  TreePath q = p;
  for (std::size_t i = 1; i < q.comps.size(); ++i) {
    if (q.comps[i].side != 'Y') continue;
    auto it = tau.find(q.comps[i].token);
    if (it == tau.end()) return std::nullopt;
    q.comps[i].token = it->second;
  }
  if (q.comps.back().side == 'X') {
    auto it = tau.find(q.leaf);
    if (it == tau.end()) return std::nullopt;
    q.leaf = it->second;
  }
  return format_tree(q);
}

}  // namespace

VertexMap qi_free_product_map(const VertexMap& f, const LocalGraph& c, int outer_radius,
                              int net_separation) {
  if (outer_radius < 1) throw SpecError("qi transport: outer radius must be >= 1");
  if (net_separation < 1) throw SpecError("qi transport: net separation must be >= 1");
  if (f.section_only)
    throw HypothesisError(
        "qi transport: the factor comparison must be bijective; section-only records "
        "cannot be transported");
  const LocalGraph& a = f.source;
  const LocalGraph& b = f.target;
  if (!a.is_infinite || !b.is_infinite)
    throw HypothesisError("qi transport: both sides of the factor comparison must be infinite");
  require_infinite_free_product(c);

  const int net_radius = outer_radius + 4 * net_separation + 2;
  if (f.inner_radius < net_radius)
    throw HypothesisError("qi transport: the factor comparison is certified to radius " +
                          std::to_string(f.inner_radius) + " but the net needs radius " +
                          std::to_string(net_radius) +
                          "; re-materialize the comparison wider");

  // Re-base so basepoints correspond; homogeneity keeps the constants.
  bool normalized = false;
  const Addr image_bp = f.apply(a.basepoint);
  auto moved = [&](const Addr& u) -> Addr {
    const Addr& w = f.apply(u);
    return normalized ? b.moves->to_basepoint(image_bp, w) : w;
  };
  if (image_bp != b.basepoint) {
    if (!b.moves)
      throw HypothesisError(
          "qi transport: the comparison moves the basepoint and the target carries no "
          "homogeneity data to re-base it");
    normalized = true;
  }

  // Fiber transport: each net fiber is matched with its image set in address
  // order. The net's basepoint fiber is the basepoint alone, so tau is based.
  FiniteBall net_ball = ball(a, a.basepoint, net_radius);
  Net net = greedy_net(a, net_ball, net_separation);
  if (!net.basepoint_unique)
    throw InternalError("qi transport: degenerate net on an infinite factor");
  std::map<Addr, Addr> tau, tau_inv;
  for (const auto& [member, fiber] : net.fibers()) {
    std::vector<Addr> images;
    images.reserve(fiber.size());
    for (const Addr& u : fiber) images.push_back(moved(u));
    std::sort(images.begin(), images.end());
    for (std::size_t i = 0; i < fiber.size(); ++i) {
      tau[fiber[i]] = images[i];
      if (!tau_inv.emplace(images[i], fiber[i]).second)
        throw InternalError("qi transport: fiber images collide at " + images[i]);
    }
  }
  if (tau.at(a.basepoint) != b.basepoint)
    throw InternalError("qi transport: fiber transport failed to stay based");

  VertexMap m;
  m.source = free_product_space(a, c);
  m.target = free_product_space(b, c);
  m.outer_radius = outer_radius;
  if (normalized) m.provenance.push_back("basepoint normalization by homogeneity");
  m.provenance.push_back("net(separation " + std::to_string(net_separation) +
                         ") on the moving factor");
  m.provenance.push_back("cross edges rerouted to net points");
  m.provenance.push_back("copies consolidated at net points");
  m.provenance.push_back("factor comparison transported along net fibers");
  m.provenance.push_back("expansion back off the net");

  FiniteBall bs = ball(m.source, m.source.basepoint, outer_radius);
  FiniteBall bt = ball(m.target, m.target.basepoint, outer_radius);
  for (const Addr& u : bs.vertices)
    if (std::optional<Addr> w = rewrite(parse_tree(u), tau)) m.forward[u] = *w;
  for (const Addr& w : bt.vertices)
    if (std::optional<Addr> u = rewrite(parse_tree(w), tau_inv)) m.inverse[w] = *u;

  certify(m, bs, bt);
  return m;
}

}  // namespace qig
