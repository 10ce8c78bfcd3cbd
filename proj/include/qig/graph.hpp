#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qig/base.hpp"

namespace qig {

// --- optional capabilities a space may carry --------------------------------

// Exact path-metric evaluator (closed form or table-backed). When present it
// must agree with BFS distance on every enumerated pair.
struct ExactMetric {
  virtual ~ExactMetric() = default;
  virtual std::int64_t dist(const Addr& u, const Addr& v) const = 0;
};

// Uniformly bilipschitz self-maps moving any vertex to the basepoint and back.
// Cayley graphs implement this with left translation (graph isomorphisms).
struct Homogeneity {
  virtual ~Homogeneity() = default;
  virtual Addr to_basepoint(const Addr& g, const Addr& v) const = 0;    // v -> g^{-1} v
  virtual Addr from_basepoint(const Addr& g, const Addr& v) const = 0;  // v -> g v
};

// Labels a tree-of-spaces: which copy a vertex lies in, which side that copy
// belongs to, and the vertex's name inside its copy.
struct TreeLabels {
  virtual ~TreeLabels() = default;
  virtual std::string copy_of(const Addr& v) const = 0;
  virtual char side_of(const Addr& v) const = 0;
  virtual Addr leaf_of(const Addr& v) const = 0;
  // True when {u,v} is a cross edge (joins two different copies).
  virtual bool is_cross(const Addr& u, const Addr& v) const = 0;
};

// Deterministic geodesic ray from the basepoint.
struct RayOracle {
  virtual ~RayOracle() = default;
  virtual Addr step(std::int64_t n) const = 0;
};

// Group structure on vertex addresses (normal forms); lets callers compute
// products and inverses without caring which engine is underneath.
struct GroupOps {
  virtual ~GroupOps() = default;
  virtual Addr mul(const Addr& a, const Addr& b) const = 0;
  virtual Addr inv(const Addr& a) const = 0;
  virtual Addr identity() const = 0;
};

// --- the space itself --------------------------------------------------------

struct LocalGraph {
  std::string name;
  Addr basepoint;
  std::function<std::vector<Addr>(const Addr&)> neighbors;
  int valence_bound = 0;
  bool is_infinite = false;

  std::shared_ptr<const ExactMetric> metric;    // optional
  std::shared_ptr<const Homogeneity> moves;     // optional
  std::shared_ptr<const TreeLabels> labels;     // optional
  std::shared_ptr<const RayOracle> ray;         // optional
  std::shared_ptr<const GroupOps> ops;          // optional

  // The declarative description this space was built from, when there is one;
  // serialized JSON. Used by exports so runs can be reproduced.
  std::string spec_json;
};

// Same graph, new basepoint. Keeps metric/labels/ops; drops ray and moves
// unless the caller re-derives them.
LocalGraph rebase(const LocalGraph& g, const Addr& new_basepoint);

// Wraps the neighbor oracle with a memo table. Observationally pure; safe for
// concurrent readers.
LocalGraph memoized(const LocalGraph& g);

// --- materialized balls -------------------------------------------------------

struct FiniteBall {
  Addr center;
  int radius = 0;
  std::vector<Addr> vertices;  // BFS order, address-sorted within layers
  std::vector<std::pair<Addr, Addr>> edges;  // each stored (min,max), sorted
  std::map<Addr, int> dist;
  std::map<Addr, std::size_t> index;

  bool contains(const Addr& v) const { return dist.count(v) != 0; }
};

// BFS ball materialization. Validates the oracle contract while walking
// (valence bound, symmetry, no self-loops, no duplicate neighbors) and throws
// MalformedSpaceError on violations.
FiniteBall ball(const LocalGraph& space, const Addr& center, int radius);

// Exact distance if <= cap, nullopt otherwise. Uses the space's exact metric
// when present, capped BFS otherwise.
std::optional<std::int64_t> distance(const LocalGraph& space, const Addr& u, const Addr& v,
                                     std::int64_t cap);

// All-pairs-capable distance helper bound to one space: BFS-backed with a
// per-source memo when the space has no exact metric.
class DistanceEngine {
 public:
  explicit DistanceEngine(const LocalGraph& space, std::int64_t cap);
  // Distance, or cap+1 if it exceeds the cap (so comparisons stay simple).
  std::int64_t dist(const Addr& u, const Addr& v) const;

 private:
  const LocalGraph& space_;
  std::int64_t cap_;
  mutable std::map<Addr, std::map<Addr, std::int64_t>> bfs_memo_;
};

}  // namespace qig
