#include "qig/export_io.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "qig/errors.hpp"
#include "qig/group_spec.hpp"

namespace qig {

namespace {

using nlohmann::json;

std::string dumped(const json& j) { return j.dump(2) + "\n"; }

json space_block(const LocalGraph& space) {
  json j;
  j["name"] = space.name;
  if (space.spec_json.empty())
    j["spec"] = nullptr;
  else
    j["spec"] = json::parse(space.spec_json);
  return j;
}

std::string dot_quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

json pair_list(const std::map<Addr, Addr>& entries) {
  json out = json::array();
  for (const auto& [k, v] : entries) out.push_back(json::array({k, v}));
  return out;
}

}  // namespace

std::string rational_str(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// --- balls -------------------------------------------------------------------

std::string ball_json(const LocalGraph& space, const FiniteBall& b) {
  json j;
  j["kind"] = "ball";
  j["space"] = space_block(space);
  j["center"] = b.center;
  j["radius"] = b.radius;
  json verts = json::array();
  for (const Addr& v : b.vertices) verts.push_back(json::array({v, b.dist.at(v)}));
  j["vertices"] = verts;
  json edges = json::array();
  for (const auto& [u, v] : b.edges) edges.push_back(json::array({u, v}));
  j["edges"] = edges;
  return dumped(j);
}

std::string ball_dot(const LocalGraph& space, const FiniteBall& b) {
  std::ostringstream out;
  out << "graph ball {\n";
  out << "  label=" << dot_quoted(space.name + ", radius " + std::to_string(b.radius)) << ";\n";
  for (const Addr& v : b.vertices) {
    out << "  " << dot_quoted(v);
    if (v == b.center) out << " [peripheries=2]";
    out << ";\n";
  }
  for (const auto& [u, v] : b.edges)
    out << "  " << dot_quoted(u) << " -- " << dot_quoted(v) << ";\n";
  out << "}\n";
  return out.str();
}

std::string ball_text(const LocalGraph& space, const FiniteBall& b) {
  std::ostringstream out;
  out << "ball of radius " << b.radius << " around " << b.center << " in " << space.name << "\n";
  out << "vertices: " << b.vertices.size() << "  edges: " << b.edges.size() << "\n";
  int last = -1;
  for (const Addr& v : b.vertices) {
    const int d = b.dist.at(v);
    if (d != last) {
      out << "distance " << d << ":\n";
      last = d;
    }
    out << "  " << v << "\n";
  }
  return out.str();
}

// --- maps --------------------------------------------------------------------

std::string map_json(const VertexMap& m, const DistortionReport* report) {
  json j;
  j["kind"] = "vertex_map";
  j["source"] = space_block(m.source);
  j["target"] = space_block(m.target);
  json constants;
  constants["L"] = report ? json(rational_str(report->l_mult)) : json(nullptr);
  constants["C"] = report ? json(report->c_add) : json(nullptr);
  constants["inner_radius"] = m.inner_radius;
  constants["outer_radius"] = m.outer_radius;
  constants["forward_edge_bound"] = m.forward_edge_bound;
  constants["inverse_edge_bound"] = m.inverse_edge_bound;
  j["constants"] = constants;
  j["section_only"] = m.section_only;
  j["provenance"] = m.provenance;
  j["pairs"] = pair_list(m.forward);
  j["section"] = pair_list(m.inverse);
  return dumped(j);
}

std::string map_text(const VertexMap& m, const DistortionReport* report) {
  std::ostringstream out;
  out << "vertex map: " << m.source.name << " -> " << m.target.name << "\n";
  out << "radii: inner " << m.inner_radius << ", outer " << m.outer_radius << "\n";
  out << "edge bounds: forward " << m.forward_edge_bound << ", inverse " << m.inverse_edge_bound
      << "\n";
  out << "section only: " << (m.section_only ? "yes" : "no") << "\n";
  if (report)
    out << "constants: L = " << rational_str(report->l_mult) << ", C = " << report->c_add << "\n";
  out << "provenance:\n";
  for (const std::string& p : m.provenance) out << "  - " << p << "\n";
  out << "pairs: " << m.forward.size() << " forward, " << m.inverse.size() << " recorded back\n";
  return out.str();
}

VertexMap map_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("kind", "") != "vertex_map")
    throw SpecError("map import: not a vertex map record");
  for (const char* side : {"source", "target"})
    if (!j.contains(side) || !j[side].is_object() || j[side]["spec"].is_null())
      throw SpecError(std::string("map import: the ") + side +
                      " space carries no rebuildable description");

  VertexMap m;
  m.source = build_space(SpaceSpec::from_json(j["source"]["spec"]));
  m.target = build_space(SpaceSpec::from_json(j["target"]["spec"]));
  const json& constants = j.at("constants");
  m.inner_radius = constants.at("inner_radius").get<int>();
  m.outer_radius = constants.at("outer_radius").get<int>();
  m.forward_edge_bound = constants.at("forward_edge_bound").get<std::int64_t>();
  m.inverse_edge_bound = constants.at("inverse_edge_bound").get<std::int64_t>();
  m.section_only = j.at("section_only").get<bool>();
  for (const json& p : j.at("provenance")) m.provenance.push_back(p.get<std::string>());
  for (const json& p : j.at("pairs")) {
    if (!p.is_array() || p.size() != 2) throw SpecError("map import: malformed pair entry");
    m.forward[p[0].get<std::string>()] = p[1].get<std::string>();
  }
  for (const json& p : j.at("section")) {
    if (!p.is_array() || p.size() != 2) throw SpecError("map import: malformed section entry");
    m.inverse[p[0].get<std::string>()] = p[1].get<std::string>();
  }
  return m;
}

// --- reports -----------------------------------------------------------------

std::string distortion_json(const DistortionReport& report) {
  json j;
  j["kind"] = "distortion";
  j["L"] = rational_str(report.l_mult);
  j["C"] = report.c_add;
  j["L_corner"] = rational_str(report.l_corner);
  j["C_corner"] = report.c_corner;
  j["inner_radius"] = report.inner_radius;
  j["outer_radius"] = report.outer_radius;
  j["section_half"] = report.section_half;
  j["witness_ratio"] = json::array({report.witness_ratio[0], report.witness_ratio[1]});
  j["witness_additive"] = json::array({report.witness_additive[0], report.witness_additive[1]});
  return dumped(j);
}

std::string distortion_text(const DistortionReport& report) {
  std::ostringstream out;
  out << "distortion over the certified radius-" << report.inner_radius << " ball"
      << (report.section_half ? " (measured on the recorded section)" : "") << "\n";
  out << "joint fit:    L = " << rational_str(report.l_mult) << ", C = " << report.c_add << "\n";
  out << "corner fits:  L = " << rational_str(report.l_corner) << " at C = 0;  C = "
      << report.c_corner << " at L = 1\n";
  out << "ratio witness:    (" << report.witness_ratio[0] << ", " << report.witness_ratio[1]
      << ")\n";
  out << "additive witness: (" << report.witness_additive[0] << ", " << report.witness_additive[1]
      << ")\n";
  return out.str();
}

std::string ends_json(const LocalGraph& space, const EndsEstimate& estimate) {
  json j;
  j["kind"] = "ends_estimate";
  j["space"] = space_block(space);
  j["classification"] = estimate.classification;
  json counts = json::array();
  for (const auto& [r, n] : estimate.counts) counts.push_back(json::array({r, n}));
  j["counts"] = counts;
  return dumped(j);
}

std::string ends_text(const LocalGraph& space, const EndsEstimate& estimate) {
  std::ostringstream out;
  out << "ends estimate for " << space.name << "\n";
  out << "  R   outer components\n";
  for (const auto& [r, n] : estimate.counts) {
    out << "  ";
    std::string rs = std::to_string(r);
    out << rs << std::string(rs.size() < 4 ? 4 - rs.size() : 1, ' ') << n << "\n";
  }
  out << "classification: " << estimate.classification << "\n";
  return out.str();
}

std::string localization_json(const LocalizationReport& report) {
  json j;
  j["kind"] = "localization";
  j["located_copy"] = report.located_copy.empty() ? json(nullptr) : json(report.located_copy);
  j["r_emp"] = report.r_emp;
  j["contradiction"] =
      report.contradiction.empty() ? json(nullptr) : json(report.contradiction);
  json bundles = json::array();
  for (const auto& b : report.bundles) {
    json e;
    e["parent_copy"] = b.parent_copy;
    e["child_copy"] = b.child_copy;
    e["inside"] = b.inside;
    e["outside"] = b.outside;
    e["direction"] = b.direction;
    bundles.push_back(e);
  }
  j["bundles"] = bundles;
  return dumped(j);
}

std::string localization_text(const LocalizationReport& report) {
  std::ostringstream out;
  if (!report.located_copy.empty())
    out << "located copy: " << report.located_copy << " (image radius " << report.r_emp << ")\n";
  else
    out << "located copy: none\n";
  if (!report.contradiction.empty()) out << "contradiction: " << report.contradiction << "\n";
  out << "oriented bundles (image weight child side / parent side):\n";
  for (const auto& b : report.bundles) {
    out << "  " << b.parent_copy << " -> " << b.child_copy << ": " << b.inside << " / "
        << b.outside << "  "
        << (b.direction > 0 ? "toward child" : b.direction < 0 ? "toward parent" : "tie") << "\n";
  }
  return out.str();
}

}  // namespace qig
