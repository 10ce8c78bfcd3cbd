#pragma once

#include <string>

#include "qig/graph.hpp"
#include "qig/metrics.hpp"
#include "qig/vertex_map.hpp"

namespace qig {

// Canonical "p/q" rendering of an exact rational constant (always reduced,
// always with the slash, so files stay byte-stable).
std::string rational_str(const Rational& r);

// Every export below is deterministic: object keys are sorted, list entries
// carry a definite order, and the same inputs always produce the same bytes.

std::string ball_json(const LocalGraph& space, const FiniteBall& b);
std::string ball_dot(const LocalGraph& space, const FiniteBall& b);
std::string ball_text(const LocalGraph& space, const FiniteBall& b);

// Full map record: spaces (with their rebuildable descriptions when they have
// one), constants, provenance, and the materialized pairs.  The optional
// report supplies the headline constants.
std::string map_json(const VertexMap& m, const DistortionReport* report = nullptr);
std::string map_text(const VertexMap& m, const DistortionReport* report = nullptr);

// Rebuilds a map from its JSON record.  Requires both spaces to carry a
// rebuildable description; recorded radii and bounds are imported as-is.
VertexMap map_from_json(const std::string& text);

std::string distortion_json(const DistortionReport& report);
std::string distortion_text(const DistortionReport& report);

std::string ends_json(const LocalGraph& space, const EndsEstimate& estimate);
std::string ends_text(const LocalGraph& space, const EndsEstimate& estimate);

std::string localization_json(const LocalizationReport& report);
std::string localization_text(const LocalizationReport& report);

}  // namespace qig
