#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qig {

// Canonical vertex address. Total order = byte-wise string order; every
// tie-break in the library uses it, which is what makes runs reproducible.
using Addr = std::string;

// --- token escaping -------------------------------------------------------
//
// Tree-shaped spaces serialize as `X@v1/Y@v2/.../S@vk#leaf`. The characters
// `@ / # { }` are structural; any token containing them is carried inside
// balanced braces `{...}`. The bare token `-` is reserved for "root copy,
// no attach vertex".

bool token_needs_wrap(const std::string& raw);
std::string wrap_token(const std::string& raw);
// Escapes iff needed; wrap_token always wraps.
std::string escape_token(const std::string& raw);
// Inverse of escape_token.
std::string unescape_token(const std::string& tok);

// Splits at top-level (brace depth 0) occurrences of `sep`.
std::vector<std::string> split_top(const std::string& s, char sep);

// --- tree addresses --------------------------------------------------------

struct PathComp {
  char side;          // which family of copies this component belongs to
  std::string token;  // attach vertex in the parent copy; "-" for a root
  bool is_root() const { return token == "-"; }
  friend bool operator==(const PathComp&, const PathComp&) = default;
};

struct TreePath {
  std::vector<PathComp> comps;  // outermost copy first; never empty
  std::string leaf;             // vertex inside the final copy
  friend bool operator==(const TreePath&, const TreePath&) = default;
};

std::string format_tree(const TreePath& p);
// Throws SpecError on grammar violations.
TreePath parse_tree(const Addr& a);
std::optional<TreePath> try_parse_tree(const Addr& a);

// --- integer / vector addresses ---------------------------------------------
//
// Signed integers carry an explicit sign ("0", "+1", "-1") so that the
// positive value of each magnitude precedes the negative one in address
// order. Rank >= 2 uses "(c1,...,cn)".

std::string int_addr(std::int64_t v);
std::int64_t parse_int_addr(const std::string& s);
std::string vec_addr(const std::vector<std::int64_t>& v);
std::vector<std::int64_t> parse_vec_addr(const std::string& s, std::size_t rank);

// Validates a user-supplied element name: nonempty, none of `@ / # { } ( ) , . : '`
// or whitespace, and not the reserved bare tokens "-" / "+".
bool valid_element_name(const std::string& s);

}  // namespace qig
