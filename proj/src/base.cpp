#include "qig/base.hpp"

#include <cctype>
#include <charconv>

#include "qig/errors.hpp"

namespace qig {

namespace {

constexpr const char* kStructural = "@/#{}";

bool balanced_braces(const std::string& s) {
  int depth = 0;
  for (char c : s) {
    if (c == '{') ++depth;
    if (c == '}' && --depth < 0) return false;
  }
  return depth == 0;
}

}  // namespace

bool token_needs_wrap(const std::string& raw) {
  if (raw == "-") return true;
  return raw.find_first_of(kStructural) != std::string::npos;
}

std::string wrap_token(const std::string& raw) {
  if (!balanced_braces(raw)) throw InternalError("wrap_token: unbalanced braces in \"" + raw + "\"");
  return "{" + raw + "}";
}

std::string escape_token(const std::string& raw) {
  return token_needs_wrap(raw) ? wrap_token(raw) : raw;
}

std::string unescape_token(const std::string& tok) {
  if (tok.size() >= 2 && tok.front() == '{' && tok.back() == '}') {
    std::string inner = tok.substr(1, tok.size() - 2);
    if (balanced_braces(inner)) return inner;
  }
  return tok;
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string format_tree(const TreePath& p) {
  if (p.comps.empty()) throw InternalError("format_tree: empty copy path");
  std::string out;
  for (std::size_t i = 0; i < p.comps.size(); ++i) {
    if (i) out.push_back('/');
    out.push_back(p.comps[i].side);
    out.push_back('@');
    out += p.comps[i].is_root() ? "-" : escape_token(p.comps[i].token);
  }
  out.push_back('#');
  out += escape_token(p.leaf);
  return out;
}

std::optional<TreePath> try_parse_tree(const Addr& a) {
  if (!balanced_braces(a)) return std::nullopt;
  auto hash_parts = split_top(a, '#');
  if (hash_parts.size() != 2 || hash_parts[1].empty()) return std::nullopt;
  TreePath p;
  p.leaf = unescape_token(hash_parts[1]);
  for (const auto& comp : split_top(hash_parts[0], '/')) {
    if (comp.size() < 3 || comp[1] != '@' || !std::isalpha(static_cast<unsigned char>(comp[0])))
      return std::nullopt;
    std::string tok = comp.substr(2);
    p.comps.push_back({comp[0], tok == "-" ? tok : unescape_token(tok)});
  }
  if (p.comps.empty()) return std::nullopt;
  return p;
}

TreePath parse_tree(const Addr& a) {
  auto p = try_parse_tree(a);
  if (!p) throw SpecError("not a tree address: \"" + a + "\"");
  return *p;
}

std::string int_addr(std::int64_t v) {
  if (v == 0) return "0";
  return (v > 0 ? "+" : "") + std::to_string(v);
}

std::int64_t parse_int_addr(const std::string& s) {
  if (s.empty()) throw SpecError("empty integer address");
  std::size_t begin = (s[0] == '+') ? 1 : 0;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SpecError("bad integer address: \"" + s + "\"");
  if (int_addr(v) != s) throw SpecError("non-canonical integer address: \"" + s + "\"");
  return v;
}

std::string vec_addr(const std::vector<std::int64_t>& v) {
  if (v.size() == 1) return int_addr(v[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(',');
    out += int_addr(v[i]);
  }
  out.push_back(')');
  return out;
}

std::vector<std::int64_t> parse_vec_addr(const std::string& s, std::size_t rank) {
  if (rank == 1) return {parse_int_addr(s)};
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw SpecError("bad vector address: \"" + s + "\"");
  auto parts = split_top(s.substr(1, s.size() - 2), ',');
  if (parts.size() != rank)
    throw SpecError("vector address rank mismatch: \"" + s + "\"");
  std::vector<std::int64_t> out;
  out.reserve(rank);
  for (const auto& p : parts) out.push_back(parse_int_addr(p));
  return out;
}

bool valid_element_name(const std::string& s) {
  if (s.empty() || s == "-" || s == "+") return false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    switch (c) {
      case '@': case '/': case '#': case '{': case '}':
      case '(': case ')': case ',': case '.': case ':': case '\'':
        return false;
      default:
        break;
    }
  }
  return true;
}

}  // namespace qig
