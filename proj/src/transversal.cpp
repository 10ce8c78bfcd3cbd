#include "qig/transversal.hpp"

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "qig/errors.hpp"

namespace qig {

namespace {

// Exhaustive minimum search over one connected component of the coset
// incidence graph.  Walks the component's first-partition cosets in order,
// picking for each an element whose second-partition coset is still free;
// every completed assignment is a perfect matching restricted to the
// component.  Components hold at most (coset size)! matchings over a handful
// of cosets, so the full walk stays cheap for the table-backed groups this
// library works with.
struct ComponentSearch {
  const FiniteTableData& g;
  const CosetPartition& p1;
  const CosetPartition& p2;
  std::vector<int> cosets1;  // the component's first-partition cosets
  int forced = -1;           // element whose edge must be used (-1 = none)

  std::vector<char> used2;                  // second-partition coset taken?
  std::vector<int> chosen;                  // element picked per cosets1 slot
  std::vector<std::string> best_names;      // least sorted name list so far
  std::vector<int> best;                    // matching behind best_names

  void run(std::size_t at) {
    if (at == cosets1.size()) {
      std::vector<std::string> names;
      names.reserve(chosen.size());
      for (int e : chosen) names.push_back(g.names[e]);
      std::sort(names.begin(), names.end());
      if (best.empty() || names < best_names) {
        best_names = std::move(names);
        best = chosen;
      }
      return;
    }
    const int c1 = cosets1[at];
    for (int e : p1.cosets[c1]) {
      if (forced >= 0 && p1.coset_of[forced] == c1 && e != forced) continue;
      const int c2 = p2.coset_of[e];
      if (used2[c2]) continue;
      used2[c2] = 1;
      chosen.push_back(e);
      run(at + 1);
      chosen.pop_back();
      used2[c2] = 0;
    }
  }
};

}  // namespace

Transversal hnn_transversal(const FiniteTableData& g, const CosetPartition& p1,
                            const CosetPartition& p2) {
  const std::size_t n = g.names.size();
  if (p1.coset_of.size() != n || p2.coset_of.size() != n)
    throw SpecError("transversal: coset partitions do not cover the group");
  if (p1.cosets.empty() || p2.cosets.empty())
    throw SpecError("transversal: empty coset partition");

  const std::size_t coset_size = p1.cosets.front().size();
  for (const auto& c : p1.cosets)
    if (c.size() != coset_size)
      throw SpecError("transversal: first partition has cosets of unequal size");
  for (const auto& c : p2.cosets)
    if (c.size() != coset_size)
      throw SpecError("transversal: second partition's coset size differs from the first's");
  if (p1.cosets.size() != p2.cosets.size())
    throw InternalError("transversal: partitions with equal coset size disagree on coset count");

  // Connected components of the incidence graph, tracked on first-partition
  // cosets: two cosets are linked when a second-partition coset meets both.
  const std::size_t k = p1.cosets.size();
  std::vector<int> comp1(k, -1);
  std::vector<int> comp2(k, -1);
  int comp_count = 0;
  for (std::size_t seed = 0; seed < k; ++seed) {
    if (comp1[seed] >= 0) continue;
    const int id = comp_count++;
    std::vector<int> stack{static_cast<int>(seed)};
    comp1[seed] = id;
    while (!stack.empty()) {
      const int c1 = stack.back();
      stack.pop_back();
      for (int e : p1.cosets[c1]) {
        const int c2 = p2.coset_of[e];
        if (comp2[c2] >= 0) continue;
        comp2[c2] = id;
        for (std::size_t other = 0; other < k; ++other) {
          if (comp1[other] >= 0) continue;
          for (int f : p1.cosets[other]) {
            if (p2.coset_of[f] == c2) {
              comp1[other] = id;
              stack.push_back(static_cast<int>(other));
              break;
            }
          }
        }
      }
    }
  }

  Transversal out;
  out.pick1.assign(k, -1);
  out.pick2.assign(k, -1);
  for (int id = 0; id < comp_count; ++id) {
    ComponentSearch search{g, p1, p2, {}, -1, {}, {}, {}, {}};
    search.used2.assign(k, 0);
    for (std::size_t c = 0; c < k; ++c)
      if (comp1[c] == id) search.cosets1.push_back(static_cast<int>(c));
    if (comp1[p1.coset_of[g.identity]] == id) search.forced = g.identity;
    search.run(0);
    if (search.best.empty())
      throw InternalError("transversal: a regular incidence component admitted no matching");
    for (std::size_t i = 0; i < search.cosets1.size(); ++i) {
      const int e = search.best[i];
      out.pick1[search.cosets1[i]] = e;
      out.pick2[p2.coset_of[e]] = e;
      out.members.push_back(e);
    }
  }

  for (std::size_t c = 0; c < k; ++c)
    if (out.pick1[c] < 0 || out.pick2[c] < 0)
      throw InternalError("transversal: a coset was left without a representative");
  std::sort(out.members.begin(), out.members.end(),
            [&](int a, int b) { return g.names[a] < g.names[b]; });
  return out;
}

}  // namespace qig
