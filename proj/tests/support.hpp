#pragma once

// Independent brute-force oracles for the test suite. These deliberately
// share no code with the library: plain queues, plain maps, no tie-break
// cleverness. Expected values frozen in the test files were produced by
// these oracles (or by hand enumeration) before the library implementation
// existed.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qig/graph.hpp"

namespace oracle {

using Neighbors = std::function<std::vector<std::string>(const std::string&)>;

struct BallResult {
  std::map<std::string, int> dist;
  std::set<std::pair<std::string, std::string>> edges;  // (min,max)
};

inline BallResult ball(const Neighbors& nb, const std::string& center, int radius) {
  BallResult r;
  r.dist[center] = 0;
  std::deque<std::string> q{center};
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    if (r.dist[v] == radius) continue;
    for (const auto& w : nb(v)) {
      if (!r.dist.count(w)) {
        r.dist[w] = r.dist[v] + 1;
        q.push_back(w);
      }
    }
  }
  for (const auto& [v, d] : r.dist) {
    (void)d;
    for (const auto& w : nb(v))
      if (r.dist.count(w)) r.edges.insert(v < w ? std::make_pair(v, w) : std::make_pair(w, v));
  }
  return r;
}

inline int distance(const Neighbors& nb, const std::string& u, const std::string& v, int cap) {
  if (u == v) return 0;
  std::map<std::string, int> dist{{u, 0}};
  std::deque<std::string> q{u};
  while (!q.empty()) {
    auto cur = q.front();
    q.pop_front();
    if (dist[cur] >= cap) continue;
    for (const auto& w : nb(cur)) {
      if (dist.count(w)) continue;
      if (w == v) return dist[cur] + 1;
      dist[w] = dist[cur] + 1;
      q.push_back(w);
    }
  }
  return -1;  // exceeds cap
}

// Connected components of an induced subgraph, by repeated flooding.
inline std::vector<std::set<std::string>> components(const std::set<std::string>& verts,
                                                     const Neighbors& nb) {
  std::vector<std::set<std::string>> out;
  std::set<std::string> left = verts;
  while (!left.empty()) {
    std::set<std::string> comp;
    std::deque<std::string> q{*left.begin()};
    left.erase(left.begin());
    comp.insert(q.front());
    while (!q.empty()) {
      auto v = q.front();
      q.pop_front();
      for (const auto& w : nb(v)) {
        if (left.count(w)) {
          left.erase(w);
          comp.insert(w);
          q.push_back(w);
        }
      }
    }
    out.push_back(std::move(comp));
  }
  return out;
}

// Naive reduced-word arithmetic for free groups: words over ±letters,
// letter i>0 = generator i-1, letter -i = its inverse.
struct FreeWord {
  std::vector<int> letters;
  void push(int letter) {
    if (!letters.empty() && letters.back() == -letter)
      letters.pop_back();
    else
      letters.push_back(letter);
  }
};

inline qig::Addr free_word_addr(const FreeWord& w) {
  if (w.letters.empty()) return "1";
  std::string s;
  for (int l : w.letters) {
    s.push_back(static_cast<char>('a' + (l > 0 ? l : -l) - 1));
    if (l < 0) s.push_back('\'');
  }
  return s;
}

inline std::mt19937 rng(unsigned seed) { return std::mt19937(seed); }

}  // namespace oracle
