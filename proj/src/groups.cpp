#include "qig/groups.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <set>

#include "qig/errors.hpp"

namespace qig {

namespace {

// Internal engine interface: address-level group arithmetic plus whatever
// extras the group class supports (exact word length, a geodesic ray).
struct Engine {
  virtual ~Engine() = default;
  virtual Addr id() const = 0;
  virtual Addr mul(const Addr& a, const Addr& b) const = 0;
  virtual Addr inv(const Addr& a) const = 0;
  // Generator elements, in canonical enumeration order.
  virtual std::vector<Addr> gens() const = 0;
  // Exact distance from the identity w.r.t. gens(); nullopt when the engine
  // has no closed form (callers fall back to BFS).
  virtual std::optional<long long> len(const Addr& a) const { (void)a; return std::nullopt; }
  // Geodesic ray step, for infinite groups.
  virtual std::optional<Addr> ray_step(long long n) const { (void)n; return std::nullopt; }
};

struct EngineOps final : GroupOps {
  std::shared_ptr<const Engine> e;
  explicit EngineOps(std::shared_ptr<const Engine> e) : e(std::move(e)) {}
  Addr mul(const Addr& a, const Addr& b) const override { return e->mul(a, b); }
  Addr inv(const Addr& a) const override { return e->inv(a); }
  Addr identity() const override { return e->id(); }
};

struct EngineMoves final : Homogeneity {
  std::shared_ptr<const Engine> e;
  explicit EngineMoves(std::shared_ptr<const Engine> e) : e(std::move(e)) {}
  Addr to_basepoint(const Addr& g, const Addr& v) const override {
    return e->mul(e->inv(g), v);
  }
  Addr from_basepoint(const Addr& g, const Addr& v) const override { return e->mul(g, v); }
};

struct EngineMetric final : ExactMetric {
  std::shared_ptr<const Engine> e;
  explicit EngineMetric(std::shared_ptr<const Engine> e) : e(std::move(e)) {}
  std::int64_t dist(const Addr& u, const Addr& v) const override {
    auto l = e->len(e->mul(e->inv(u), v));
    if (!l) throw InternalError("engine metric without length form");
    return *l;
  }
};

struct EngineRay final : RayOracle {
  std::shared_ptr<const Engine> e;
  explicit EngineRay(std::shared_ptr<const Engine> e) : e(std::move(e)) {}
  Addr step(std::int64_t n) const override {
    auto a = e->ray_step(n);
    if (!a) throw InternalError("ray unavailable");
    return *a;
  }
};

LocalGraph graph_from_engine(std::shared_ptr<const Engine> eng, const GroupSpec& spec,
                             bool with_metric, bool with_ray) {
  LocalGraph g;
  g.name = spec.display_name();
  g.basepoint = eng->id();
  g.is_infinite = spec.infinite();
  auto gen_elems = eng->gens();
  g.valence_bound = static_cast<int>(gen_elems.size());
  g.neighbors = [eng, gen_elems](const Addr& v) {
    std::vector<Addr> out;
    out.reserve(gen_elems.size());
    for (const auto& s : gen_elems) {
      Addr w = eng->mul(v, s);
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    return out;
  };
  g.ops = std::make_shared<EngineOps>(eng);
  g.moves = std::make_shared<EngineMoves>(eng);
  if (with_metric) g.metric = std::make_shared<EngineMetric>(eng);
  if (with_ray && g.is_infinite) g.ray = std::make_shared<EngineRay>(eng);
  g.spec_json = spec.to_json().dump();
  return g;
}

// ---------------------------------------------------------------- finite table

struct TableEngine final : Engine {
  FiniteTableData t;
  std::vector<long long> dist_from_id;

  explicit TableEngine(FiniteTableData data) : t(std::move(data)) {
    dist_from_id.assign(t.n(), -1);
    dist_from_id[t.identity] = 0;
    std::deque<int> q{t.identity};
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int s : t.gens) {
        int w = t.mul(v, s);
        if (dist_from_id[w] < 0) {
          dist_from_id[w] = dist_from_id[v] + 1;
          q.push_back(w);
        }
      }
    }
  }
  Addr id() const override { return t.names[t.identity]; }
  Addr mul(const Addr& a, const Addr& b) const override {
    return t.names[t.mul(t.index_of(a), t.index_of(b))];
  }
  Addr inv(const Addr& a) const override { return t.names[t.inv(t.index_of(a))]; }
  std::vector<Addr> gens() const override {
    std::vector<Addr> out;
    for (int g : t.gens) out.push_back(t.names[g]);
    return out;
  }
  std::optional<long long> len(const Addr& a) const override {
    return dist_from_id[t.index_of(a)];
  }
};

// ---------------------------------------------------------------- free abelian

struct AbelianEngine final : Engine {
  int rank;
  explicit AbelianEngine(int r) : rank(r) {}
  Addr id() const override { return vec_addr(std::vector<std::int64_t>(rank, 0)); }
  Addr mul(const Addr& a, const Addr& b) const override {
    auto va = parse_vec_addr(a, rank), vb = parse_vec_addr(b, rank);
    for (int i = 0; i < rank; ++i) va[i] += vb[i];
    return vec_addr(va);
  }
  Addr inv(const Addr& a) const override {
    auto v = parse_vec_addr(a, rank);
    for (auto& c : v) c = -c;
    return vec_addr(v);
  }
  std::vector<Addr> gens() const override {
    std::vector<Addr> out;
    for (int i = 0; i < rank; ++i)
      for (int sgn : {+1, -1}) {
        std::vector<std::int64_t> v(rank, 0);
        v[i] = sgn;
        out.push_back(vec_addr(v));
      }
    std::sort(out.begin(), out.end());
    return out;
  }
  std::optional<long long> len(const Addr& a) const override {
    long long s = 0;
    for (auto c : parse_vec_addr(a, rank)) s += c < 0 ? -c : c;
    return s;
  }
  std::optional<Addr> ray_step(long long n) const override {
    std::vector<std::int64_t> v(rank, 0);
    v[0] = n;
    return vec_addr(v);
  }
};

// ---------------------------------------------------------------- free group

struct FreeEngine final : Engine {
  int rank;
  explicit FreeEngine(int r) : rank(r) {}

  // A letter is (index, inverted); serialized 'a'..'z' with a trailing
  // apostrophe for inverses, so a < a' < b < b' in address order.
  using Word = std::vector<std::pair<int, bool>>;

  Word parse(const Addr& a) const {
    if (a == "1") return {};
    if (a.empty()) throw SpecError("empty free-group address");
    Word w;
    for (std::size_t i = 0; i < a.size();) {
      char c = a[i];
      if (c < 'a' || c >= 'a' + rank) throw SpecError("bad free-group address: \"" + a + "\"");
      bool invd = i + 1 < a.size() && a[i + 1] == '\'';
      w.push_back({c - 'a', invd});
      i += invd ? 2 : 1;
    }
    for (std::size_t k = 0; k + 1 < w.size(); ++k)
      if (w[k].first == w[k + 1].first && w[k].second != w[k + 1].second)
        throw SpecError("non-reduced free-group address: \"" + a + "\"");
    return w;
  }
  static Addr print(const Word& w) {
    if (w.empty()) return "1";
    Addr out;
    for (auto [i, invd] : w) {
      out.push_back(static_cast<char>('a' + i));
      if (invd) out.push_back('\'');
    }
    return out;
  }
  static void push_reduce(Word& w, std::pair<int, bool> letter) {
    if (!w.empty() && w.back().first == letter.first && w.back().second != letter.second)
      w.pop_back();
    else
      w.push_back(letter);
  }

  Addr id() const override { return "1"; }
  Addr mul(const Addr& a, const Addr& b) const override {
    Word w = parse(a);
    for (auto l : parse(b)) push_reduce(w, l);
    return print(w);
  }
  Addr inv(const Addr& a) const override {
    Word w = parse(a), out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->first, !it->second});
    return print(out);
  }
  std::vector<Addr> gens() const override {
    std::vector<Addr> out;
    for (int i = 0; i < rank; ++i) {
      out.push_back(std::string(1, static_cast<char>('a' + i)));
      out.push_back(out.back() + "'");
    }
    return out;
  }
  std::optional<long long> len(const Addr& a) const override {
    return static_cast<long long>(parse(a).size());
  }
  std::optional<Addr> ray_step(long long n) const override {
    return print(Word(n, {0, false}));
  }
};

// ------------------------------------------------------- free product of groups
//
// Elements are alternating syllable strings "i:elem.j:elem..." ("1" for the
// identity), where i indexes the factor and elem is a non-identity normal
// form of that factor. Factor addresses containing '.' ':' '{' '}' ride
// inside braces.

std::string syll_escape(const std::string& elem) {
  if (elem.find_first_of(".:{}") != std::string::npos) return wrap_token(elem);
  return elem;
}

struct ProductEngine final : Engine {
  std::vector<std::shared_ptr<const Engine>> parts;
  std::vector<bool> part_infinite;
  std::vector<bool> part_trivial;
  bool has_len = true;

  using Syll = std::vector<std::pair<int, Addr>>;

  Syll parse(const Addr& a) const {
    if (a == "1") return {};
    Syll out;
    for (const auto& tok : split_top(a, '.')) {
      auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0)
        throw SpecError("bad product address: \"" + a + "\"");
      int idx = -1;
      try {
        idx = std::stoi(tok.substr(0, colon));
      } catch (const std::exception&) {
        throw SpecError("bad factor index in \"" + a + "\"");
      }
      if (idx < 0 || idx >= static_cast<int>(parts.size()))
        throw SpecError("bad factor index in \"" + a + "\"");
      if (!out.empty() && out.back().first == idx)
        throw SpecError("non-alternating product address: \"" + a + "\"");
      Addr e = unescape_token(tok.substr(colon + 1));
      if (e == parts[idx]->id())
        throw SpecError("identity syllable in product address: \"" + a + "\"");
      // Factor addresses must be canonical; multiplying by the factor's
      // identity both validates and normalizes, so reject any drift.
      if (parts[idx]->mul(e, parts[idx]->id()) != e)
        throw SpecError("non-canonical factor element \"" + e + "\" in \"" + a + "\"");
      out.push_back({idx, e});
    }
    return out;
  }
  static Addr print(const Syll& s) {
    if (s.empty()) return "1";
    Addr out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out.push_back('.');
      out += std::to_string(s[i].first);
      out.push_back(':');
      out += syll_escape(s[i].second);
    }
    return out;
  }
  void push_letter(Syll& w, int idx, const Addr& e) const {
    if (e == parts[idx]->id()) return;
    if (!w.empty() && w.back().first == idx) {
      Addr merged = parts[idx]->mul(w.back().second, e);
      if (merged == parts[idx]->id())
        w.pop_back();
      else
        w.back().second = merged;
    } else {
      w.push_back({idx, e});
    }
  }

  Addr id() const override { return "1"; }
  Addr mul(const Addr& a, const Addr& b) const override {
    Syll w = parse(a);
    for (const auto& [idx, e] : parse(b)) push_letter(w, idx, e);
    return print(w);
  }
  Addr inv(const Addr& a) const override {
    Syll w = parse(a), out;
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      out.push_back({it->first, parts[it->first]->inv(it->second)});
    return print(out);
  }
  std::vector<Addr> gens() const override {
    std::vector<Addr> out;
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (const auto& s : parts[i]->gens())
        out.push_back(print({{static_cast<int>(i), s}}));
    return out;
  }
  std::optional<long long> len(const Addr& a) const override {
    if (!has_len) return std::nullopt;
    long long total = 0;
    for (const auto& [idx, e] : parse(a)) {
      auto l = parts[idx]->len(e);
      if (!l) return std::nullopt;
      total += *l;
    }
    return total;
  }
  std::optional<Addr> ray_step(long long n) const override {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!part_infinite[i]) continue;
      auto f = parts[i]->ray_step(n);
      if (!f) break;
      if (n == 0) return Addr("1");
      return print({{static_cast<int>(i), *f}});
    }
    // All factors finite: alternate the least generator of the two least
    // non-trivial factors; n syllables, each one generator, is geodesic.
    int i = -1, j = -1;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (part_trivial[k]) continue;
      if (i < 0)
        i = static_cast<int>(k);
      else if (j < 0) {
        j = static_cast<int>(k);
        break;
      }
    }
    if (j < 0) return std::nullopt;
    auto least_gen = [](const Engine& e) {
      auto gs = e.gens();
      return *std::min_element(gs.begin(), gs.end());
    };
    Addr si = least_gen(*parts[i]), sj = least_gen(*parts[j]);
    Syll w;
    for (long long k = 0; k < n; ++k) w.push_back(k % 2 == 0 ? std::make_pair(i, si) : std::make_pair(j, sj));
    return print(w);
  }
};

// --------------------------------------------------- amalgam over a finite edge group
//
// Normal form c1.c2...cn.f: alternating-side coset representatives (left
// cosets of the embedded edge group; representative = address-least member,
// identity coset represented by the identity) followed by an edge-group
// element. Tokens "A:name" / "B:name" / "f:name", "1" for the identity.

struct AmalgamEngine final : Engine {
  FiniteTableData a, b, f;
  Embedding ea, eb;
  CosetPartition ca, cb;

  AmalgamEngine(const GroupSpec& s)
      : a(s.a_table), b(s.b_table), f(s.f_table), ea(s.embed_a), eb(s.embed_b) {
    ca = left_cosets(a, ea);
    cb = left_cosets(b, eb);
  }

  struct Elem {
    std::vector<std::pair<int, int>> sylls;  // (side 0=A / 1=B, rep element index)
    int fpart;                               // index in f
  };

  const FiniteTableData& side(int s) const { return s == 0 ? a : b; }
  const Embedding& emb(int s) const { return s == 0 ? ea : eb; }
  const CosetPartition& part(int s) const { return s == 0 ? ca : cb; }

  // f-index of an element known to lie in the embedded image.
  int pull_back(int s, int e) const {
    const auto& im = emb(s).image;
    for (int i = 0; i < f.n(); ++i)
      if (im[i] == e) return i;
    throw InternalError("element not in edge-group image");
  }

  Elem parse(const Addr& addr) const {
    Elem e{{}, f.identity};
    if (addr == "1") return e;
    if (addr.empty()) throw SpecError("empty amalgam address");
    bool saw_f = false;
    for (const auto& tok : split_top(addr, '.')) {
      if (tok.size() < 3 || tok[1] != ':') throw SpecError("bad amalgam address: \"" + addr + "\"");
      if (saw_f) throw SpecError("bad amalgam address (tokens after edge part): \"" + addr + "\"");
      std::string name = tok.substr(2);
      if (tok[0] == 'f') {
        e.fpart = f.index_of(name);
        if (e.fpart == f.identity)
          throw SpecError("non-canonical amalgam address: \"" + addr + "\"");
        saw_f = true;
      } else if (tok[0] == 'A' || tok[0] == 'B') {
        int s = tok[0] == 'B';
        if (!e.sylls.empty() && e.sylls.back().first == s)
          throw SpecError("non-alternating amalgam address: \"" + addr + "\"");
        int x = side(s).index_of(name);
        if (x == side(s).identity || part(s).rep_of[part(s).coset_of[x]] != x)
          throw SpecError("non-canonical amalgam address: \"" + addr + "\" (\"" + name +
                          "\" is not a coset representative)");
        e.sylls.push_back({s, x});
      } else {
        throw SpecError("bad amalgam address: \"" + addr + "\"");
      }
    }
    return e;
  }
  Addr print(const Elem& e) const {
    if (e.sylls.empty() && e.fpart == f.identity) return "1";
    Addr out;
    for (const auto& [s, rep] : e.sylls) {
      if (!out.empty()) out.push_back('.');
      out += s == 0 ? "A:" : "B:";
      out += side(s).names[rep];
    }
    if (e.fpart != f.identity) {
      if (!out.empty()) out.push_back('.');
      out += "f:";
      out += f.names[e.fpart];
    }
    return out;
  }

  // Right-multiplies by an arbitrary element x of one side.
  void push_letter(Elem& g, int s, int x) const {
    const auto& tbl = side(s);
    int u = tbl.mul(emb(s).image[g.fpart], x);
    if (!g.sylls.empty() && g.sylls.back().first == s) {
      u = tbl.mul(g.sylls.back().second, u);
      int coset = part(s).coset_of[u];
      int rep = part(s).rep_of[coset];
      int rest = tbl.mul(tbl.inv(rep), u);  // in the embedded image
      if (rep == tbl.identity) {
        g.sylls.pop_back();
        g.fpart = pull_back(s, rest);
      } else {
        g.sylls.back().second = rep;
        g.fpart = pull_back(s, rest);
      }
    } else {
      int coset = part(s).coset_of[u];
      int rep = part(s).rep_of[coset];
      int rest = tbl.mul(tbl.inv(rep), u);
      if (rep != tbl.identity) g.sylls.push_back({s, rep});
      g.fpart = pull_back(s, rest);
    }
  }

  Addr id() const override { return "1"; }
  Addr mul(const Addr& ga, const Addr& gb) const override {
    Elem g = parse(ga), h = parse(gb);
    for (const auto& [s, rep] : h.sylls) push_letter(g, s, rep);
    if (h.fpart != f.identity) push_letter(g, 0, ea.image[h.fpart]);
    return print(g);
  }
  Addr inv(const Addr& ga) const override {
    Elem g = parse(ga);
    Elem out{{}, f.identity};
    if (g.fpart != f.identity) push_letter(out, 0, ea.image[f.inv(g.fpart)]);
    for (auto it = g.sylls.rbegin(); it != g.sylls.rend(); ++it)
      push_letter(out, it->first, side(it->first).inv(it->second));
    return print(out);
  }
  std::vector<Addr> gens() const override {
    std::vector<Addr> out;
    std::set<Addr> seen;
    for (int s : {0, 1})
      for (int gidx : side(s).gens) {
        Elem e{{}, f.identity};
        push_letter(e, s, gidx);
        Addr addr = print(e);
        if (seen.insert(addr).second) out.push_back(addr);
      }
    return out;
  }
  std::optional<Addr> ray_step(long long n) const override {
    // Alternate the address-least generator of each side outside the edge
    // group's image; every step appends one syllable, so the path is geodesic.
    auto pick = [&](int s) -> std::optional<int> {
      const auto& im = emb(s).image;
      std::optional<int> best;
      for (int gidx : side(s).gens) {
        if (std::find(im.begin(), im.end(), gidx) != im.end()) continue;
        if (!best || side(s).names[gidx] < side(s).names[*best]) best = gidx;
      }
      return best;
    };
    auto sa = pick(0), sb = pick(1);
    if (!sa || !sb) return std::nullopt;
    Elem g{{}, f.identity};
    for (long long k = 0; k < n; ++k) push_letter(g, k % 2 ? 1 : 0, k % 2 ? *sb : *sa);
    return print(g);
  }
};

// ------------------------------------------------------------- HNN over finite F
//
// Normal form r1·t^e1 · r2·t^e2 · ... · rn·t^en · a: each ri is a coset
// representative (left cosets of the outgoing image when ei = +1, of the
// incoming image when ei = -1), a is arbitrary. Serialized as dot-joined
// tokens "t:name" (ri, ei=+1) / "T:name" (ri, ei=-1) and a trailing "a:name"
// when a is not the identity; "1" for the identity element.

struct HnnEngine final : Engine {
  FiniteTableData a, f;
  Embedding e1, e2;  // outgoing, incoming
  CosetPartition c1, c2;

  explicit HnnEngine(const GroupSpec& s)
      : a(s.a_table), f(s.f_table), e1(s.embed_a), e2(s.embed_b) {
    c1 = left_cosets(a, e1);
    c2 = left_cosets(a, e2);
  }

  struct Elem {
    std::vector<std::pair<int, int>> sylls;  // (rep element index, eps = +1|-1)
    int last;                                // element index in a
  };

  int pull_back(const Embedding& e, int x) const {
    for (int i = 0; i < f.n(); ++i)
      if (e.image[i] == x) return i;
    throw InternalError("element not in edge-group image");
  }

  Elem parse(const Addr& addr) const {
    Elem g{{}, a.identity};
    if (addr == "1") return g;
    if (addr.empty()) throw SpecError("empty hnn address");
    bool saw_last = false;
    for (const auto& tok : split_top(addr, '.')) {
      if (tok.size() < 3 || tok[1] != ':') throw SpecError("bad hnn address: \"" + addr + "\"");
      if (saw_last) throw SpecError("bad hnn address (tokens after trailing part): \"" + addr + "\"");
      std::string name = tok.substr(2);
      if (tok[0] == 't' || tok[0] == 'T') {
        int eps = tok[0] == 't' ? +1 : -1;
        int rep = a.index_of(name);
        const CosetPartition& cp = eps > 0 ? c1 : c2;
        if (cp.rep_of[cp.coset_of[rep]] != rep)
          throw SpecError("non-canonical hnn address: \"" + addr + "\" (\"" + name +
                          "\" is not a coset representative)");
        if (rep == a.identity && !g.sylls.empty() && g.sylls.back().second == -eps)
          throw SpecError("non-canonical hnn address (reducible pattern): \"" + addr + "\"");
        g.sylls.push_back({rep, eps});
      } else if (tok[0] == 'a') {
        g.last = a.index_of(name);
        if (g.last == a.identity)
          throw SpecError("non-canonical hnn address: \"" + addr + "\"");
        saw_last = true;
      } else {
        throw SpecError("bad hnn address: \"" + addr + "\"");
      }
    }
    return g;
  }
  Addr print(const Elem& g) const {
    if (g.sylls.empty() && g.last == a.identity) return "1";
    Addr out;
    for (const auto& [rep, eps] : g.sylls) {
      if (!out.empty()) out.push_back('.');
      out += eps > 0 ? "t:" : "T:";
      out += a.names[rep];
    }
    if (g.last != a.identity) {
      if (!out.empty()) out.push_back('.');
      out += "a:";
      out += a.names[g.last];
    }
    return out;
  }

  void mul_a(Elem& g, int x) const { g.last = a.mul(g.last, x); }
  // Right-multiplies by t^eps. The stable-letter relation moves edge-group
  // elements across t: (outgoing f)·t = t·(incoming f).
  void mul_t(Elem& g, int eps) const {
    const CosetPartition& cp = eps > 0 ? c1 : c2;
    const Embedding& src = eps > 0 ? e1 : e2;
    const Embedding& dst = eps > 0 ? e2 : e1;
    int coset = cp.coset_of[g.last];
    int rep = cp.rep_of[coset];
    int fe = pull_back(src, a.mul(a.inv(rep), g.last));
    if (rep == a.identity && !g.sylls.empty() && g.sylls.back().second == -eps) {
      int prev = g.sylls.back().first;
      g.sylls.pop_back();
      g.last = a.mul(prev, dst.image[fe]);
    } else {
      g.sylls.push_back({rep, eps});
      g.last = dst.image[fe];
    }
  }

  Addr id() const override { return "1"; }
  Addr mul(const Addr& ga, const Addr& gb) const override {
    Elem g = parse(ga), h = parse(gb);
    for (const auto& [rep, eps] : h.sylls) {
      if (rep != a.identity) mul_a(g, rep);
      mul_t(g, eps);
    }
    if (h.last != a.identity) mul_a(g, h.last);
    return print(g);
  }
  Addr inv(const Addr& ga) const override {
    Elem g = parse(ga);
    Elem out{{}, a.identity};
    mul_a(out, a.inv(g.last));
    for (auto it = g.sylls.rbegin(); it != g.sylls.rend(); ++it) {
      mul_t(out, -it->second);
      mul_a(out, a.inv(it->first));
    }
    return print(out);
  }
  std::vector<Addr> gens() const override {
    std::vector<Addr> out;
    for (int gidx : a.gens) out.push_back(print({{}, gidx}));
    Elem t{{}, a.identity};
    mul_t(t, +1);
    out.push_back(print(t));
    Elem ti{{}, a.identity};
    mul_t(ti, -1);
    out.push_back(print(ti));
    return out;
  }
  std::optional<Addr> ray_step(long long n) const override {
    Elem g{{}, a.identity};
    for (long long k = 0; k < n; ++k) mul_t(g, +1);
    return print(g);
  }
};

std::shared_ptr<const Engine> make_engine(const GroupSpec& spec);

std::shared_ptr<const Engine> make_product_engine(const GroupSpec& spec) {
  auto eng = std::make_shared<ProductEngine>();
  for (const auto& f : spec.factors) {
    eng->parts.push_back(make_engine(f));
    eng->part_infinite.push_back(f.infinite());
    auto o = f.order();
    eng->part_trivial.push_back(o.has_value() && *o == 1);
    if (!eng->parts.back()->len(eng->parts.back()->id()).has_value()) eng->has_len = false;
  }
  return eng;
}

std::shared_ptr<const Engine> make_engine(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupSpec::Kind::finite_table:
      return std::make_shared<TableEngine>(spec.table);
    case GroupSpec::Kind::free_abelian:
      return std::make_shared<AbelianEngine>(spec.rank);
    case GroupSpec::Kind::free:
      return std::make_shared<FreeEngine>(spec.rank);
    case GroupSpec::Kind::free_product:
      return make_product_engine(spec);
    case GroupSpec::Kind::amalgam:
      return std::make_shared<AmalgamEngine>(spec);
    case GroupSpec::Kind::hnn:
      return std::make_shared<HnnEngine>(spec);
  }
  throw InternalError("unreachable");
}

}  // namespace

LocalGraph cayley(const GroupSpec& spec) {
  auto eng = make_engine(spec);
  bool with_metric = eng->len(eng->id()).has_value();
  bool with_ray = spec.infinite() && eng->ray_step(1).has_value();
  return graph_from_engine(eng, spec, with_metric, with_ray);
}

std::shared_ptr<const RayOracle> canonical_ray(const LocalGraph& space) {
  if (space.ray) return space.ray;
  throw HypothesisError("no canonical ray: space \"" + space.name +
                        "\" is finite or carries no ray oracle");
}

CosetPartition left_cosets(const FiniteTableData& g, const Embedding& f_embed) {
  const int n = g.n();
  CosetPartition p;
  p.coset_of.assign(n, -1);

  std::vector<int> by_name(n);
  for (int i = 0; i < n; ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(), [&](int x, int y) { return g.names[x] < g.names[y]; });

  for (int e : by_name) {
    if (p.coset_of[e] >= 0) continue;
    std::vector<int> coset;
    for (int h : f_embed.image) coset.push_back(g.mul(e, h));
    std::sort(coset.begin(), coset.end());
    int k = static_cast<int>(p.cosets.size());
    for (int m : coset) {
      if (p.coset_of[m] >= 0) throw InternalError("coset partition inconsistency");
      p.coset_of[m] = k;
    }
    bool is_id = p.coset_of[g.identity] == k;
    int rep = is_id ? g.identity
                    : *std::min_element(coset.begin(), coset.end(), [&](int x, int y) {
                        return g.names[x] < g.names[y];
                      });
    p.cosets.push_back(std::move(coset));
    p.rep_of.push_back(rep);
    if (is_id) p.identity_coset = k;
  }
  return p;
}

}  // namespace qig
