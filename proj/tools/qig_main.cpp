// Command-line front end: build spaces from spec files, run map pipelines,
// measure invariants, and export the results in stable bytes.
//
// Exit codes: 0 success, 1 usage, 2 input validation, 3 construction
// precondition failed, 4 internal assertion.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qig/collapse.hpp"
#include "qig/errors.hpp"
#include "qig/export_io.hpp"
#include "qig/graph.hpp"
#include "qig/group_spec.hpp"
#include "qig/main_map.hpp"
#include "qig/metrics.hpp"
#include "qig/pipeline.hpp"
#include "qig/product.hpp"
#include "qig/rewire.hpp"
#include "qig/vertex_map.hpp"

namespace {

using nlohmann::json;
using namespace qig;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_file(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw SpecError("\"" + path + "\" is not valid JSON");
  return j;
}

LocalGraph space_from_file(const std::string& path) {
  return build_space(SpaceSpec::from_json(parse_file(path)));
}

GroupSpec group_from_file(const std::string& path) {
  return GroupSpec::from_json(parse_file(path));
}

// Writes to --out (under QIG_OUTPUT_DIR when that is set and the path is
// relative), or to stdout when no output file was requested.
void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::string path = out;
  const char* dir = std::getenv("QIG_OUTPUT_DIR");
  if (dir && *dir && path.front() != '/') path = std::string(dir) + "/" + path;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot write \"" + path + "\"");
  f << text;
}

// Config file entries mirror long flag names; explicit flags win.
template <typename T>
void config_default(const json& cfg, const CLI::Option* opt, const char* key, T& var) {
  if (opt->count() == 0 && cfg.is_object() && cfg.contains(key)) var = cfg.at(key).get<T>();
}

std::string require_path(const std::string& path, const char* flag) {
  if (path.empty()) throw SpecError(std::string("missing required option ") + flag);
  return path;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"construct spaces, build comparison maps, and measure invariants"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON file mirroring long option names");
  json cfg = json::object();

  std::string out, format;
  std::string spec_path, x_path, y_path, a_path, b_path, f_path, c_path;
  std::string map_path, model_path, pipeline;
  int radius = 0, rmax = 0, separation = 0;

  int rc = 0;
  std::string output;

  // --- space -----------------------------------------------------------------
  CLI::App* space = app.add_subcommand("space", "build or validate a space spec");
  CLI::App* space_build = space->add_subcommand("build", "materialize a ball around the basepoint");
  space_build->add_option("spec", spec_path, "space or group spec file")->required();
  auto* sb_radius = space_build->add_option("--radius", radius, "ball radius (default 3)");
  auto* sb_format = space_build->add_option("--format", format, "json|dot|text (default json)")
                        ->check(CLI::IsMember({"json", "dot", "text"}));
  auto* sb_out = space_build->add_option("--out", out, "output file (default stdout)");
  space_build->callback([&] {
    config_default(cfg, sb_radius, "radius", radius);
    config_default(cfg, sb_format, "format", format);
    config_default(cfg, sb_out, "out", out);
    if (radius == 0) radius = 3;
    if (format.empty()) format = "json";
    LocalGraph g = space_from_file(spec_path);
    FiniteBall ball_data = ball(g, g.basepoint, radius);
    output = format == "dot"    ? ball_dot(g, ball_data)
             : format == "text" ? ball_text(g, ball_data)
                                : ball_json(g, ball_data);
  });

  CLI::App* space_validate =
      space->add_subcommand("validate", "validate a spec and echo its normalized form");
  space_validate->add_option("spec", spec_path, "space or group spec file")->required();
  auto* sv_out = space_validate->add_option("--out", out, "output file (default stdout)");
  space_validate->callback([&] {
    config_default(cfg, sv_out, "out", out);
    LocalGraph g = space_from_file(spec_path);
    if (g.spec_json.empty())
      output = "validated: " + g.name + " (no serializable normal form)\n";
    else
      output = json::parse(g.spec_json).dump(2) + "\n";
  });

  // --- map -------------------------------------------------------------------
  CLI::App* map_cmd = app.add_subcommand("map", "build a comparison map and report its constants");
  map_cmd
      ->add_option("pipeline", pipeline,
                   "plus|wedge-split|main|qi-free-product|amalgam-to-free|hnn-to-free|invariance")
      ->required()
      ->check(CLI::IsMember({"plus", "wedge-split", "main", "qi-free-product", "amalgam-to-free",
                             "hnn-to-free", "invariance"}));
  auto* m_x = map_cmd->add_option("--x", x_path, "first factor spec");
  auto* m_y = map_cmd->add_option("--y", y_path, "second factor spec");
  auto* m_a = map_cmd->add_option("--a", a_path, "first (or only) group of an extension");
  auto* m_b = map_cmd->add_option("--b", b_path, "second group of an extension");
  auto* m_f = map_cmd->add_option("--f", f_path, "edge group of an extension");
  auto* m_c = map_cmd->add_option("--c", c_path, "common free-product factor spec");
  auto* m_model = map_cmd->add_option("--model", model_path, "tree-of-spaces spec to identify");
  auto* m_radius = map_cmd->add_option("--radius", radius, "materialization radius (default 4)");
  auto* m_sep = map_cmd->add_option("--separation", separation, "net separation (default 2)");
  auto* m_format = map_cmd->add_option("--format", format, "json|text (default json)")
                       ->check(CLI::IsMember({"json", "text"}));
  auto* m_out = map_cmd->add_option("--out", out, "output file (default stdout)");
  map_cmd->callback([&] {
    config_default(cfg, m_x, "x", x_path);
    config_default(cfg, m_y, "y", y_path);
    config_default(cfg, m_a, "a", a_path);
    config_default(cfg, m_b, "b", b_path);
    config_default(cfg, m_f, "f", f_path);
    config_default(cfg, m_c, "c", c_path);
    config_default(cfg, m_model, "model", model_path);
    config_default(cfg, m_radius, "radius", radius);
    config_default(cfg, m_sep, "separation", separation);
    config_default(cfg, m_format, "format", format);
    config_default(cfg, m_out, "out", out);
    if (radius == 0) radius = 4;
    if (separation == 0) separation = 2;
    if (format.empty()) format = "json";

    VertexMap m;
    if (pipeline == "plus") {
      m = plus_map(space_from_file(require_path(x_path, "--x")), radius);
    } else if (pipeline == "wedge-split") {
      m = wedge_split_map(space_from_file(require_path(x_path, "--x")),
                          space_from_file(require_path(y_path, "--y")), radius);
    } else if (pipeline == "main") {
      m = main_map(space_from_file(require_path(x_path, "--x")),
                   space_from_file(require_path(y_path, "--y")), radius)
              .map;
    } else if (pipeline == "qi-free-product") {
      LocalGraph x = space_from_file(require_path(x_path, "--x"));
      LocalGraph c = space_from_file(require_path(c_path, "--c"));
      VertexMap f = identity_map(x, x, radius + 4 * separation + 2,
                                 "identity comparison on the moving factor");
      m = qi_free_product_map(f, c, radius, separation);
    } else if (pipeline == "amalgam-to-free") {
      json j;
      j["kind"] = "amalgam";
      j["f"] = parse_file(require_path(f_path, "--f"));
      j["a"] = parse_file(require_path(a_path, "--a"));
      j["b"] = parse_file(require_path(b_path, "--b"));
      m = amalgam_to_free_map(GroupSpec::from_json(j), radius);
    } else if (pipeline == "hnn-to-free") {
      json j;
      j["kind"] = "hnn";
      j["f"] = parse_file(require_path(f_path, "--f"));
      j["a"] = parse_file(require_path(a_path, "--a"));
      m = hnn_to_free_map(GroupSpec::from_json(j), radius);
    } else {  // invariance
      LocalGraph z = space_from_file(require_path(model_path, "--model"));
      if (z.spec_json.empty()) throw SpecError("invariance: the model has no spec to read factors from");
      SpaceSpec spec = SpaceSpec::from_json(json::parse(z.spec_json));
      if (!spec.x || !spec.y)
        throw SpecError("invariance: the model spec must be a two-factor product");
      if (!z.labels) throw HypothesisError("invariance: the model carries no copy labels");
      Addr across;
      for (const Addr& n : z.neighbors(z.basepoint))
        if (z.labels->copy_of(n) != z.labels->copy_of(z.basepoint)) across = n;
      if (across.empty()) throw HypothesisError("invariance: no cross edge at the basepoint");
      m = invariance_map(z, {z.basepoint, across}, build_space(*spec.x), build_space(*spec.y),
                         radius);
    }
    DistortionReport rep = distortion(m);
    output = format == "text" ? map_text(m, &rep) : map_json(m, &rep);
  });

  // --- measure -----------------------------------------------------------------
  CLI::App* measure = app.add_subcommand("measure", "measure an invariant and report it");
  CLI::App* ends = measure->add_subcommand("ends", "coarse end count of a space");
  ends->add_option("spec", spec_path, "space or group spec file")->required();
  auto* e_rmax = ends->add_option("--rmax", rmax, "largest annulus radius (default 4)");
  auto* e_format = ends->add_option("--format", format, "json|text (default json)")
                       ->check(CLI::IsMember({"json", "text"}));
  auto* e_out = ends->add_option("--out", out, "output file (default stdout)");
  ends->callback([&] {
    config_default(cfg, e_rmax, "rmax", rmax);
    config_default(cfg, e_format, "format", format);
    config_default(cfg, e_out, "out", out);
    if (rmax == 0) rmax = 4;
    if (format.empty()) format = "json";
    LocalGraph g = space_from_file(spec_path);
    EndsEstimate est = ends_estimate(g, rmax);
    output = format == "text" ? ends_text(g, est) : ends_json(g, est);
  });

  CLI::App* dist = measure->add_subcommand("distortion", "re-measure an exported map");
  auto* d_map = dist->add_option("--map", map_path, "map JSON file")->required();
  auto* d_format = dist->add_option("--format", format, "json|text (default json)")
                       ->check(CLI::IsMember({"json", "text"}));
  auto* d_out = dist->add_option("--out", out, "output file (default stdout)");
  dist->callback([&] {
    (void)d_map;
    config_default(cfg, d_format, "format", format);
    config_default(cfg, d_out, "out", out);
    if (format.empty()) format = "json";
    VertexMap m = map_from_json(read_file(map_path));
    DistortionReport rep = distortion(m);
    output = format == "text" ? distortion_text(rep) : distortion_json(rep);
  });

  CLI::App* loc = measure->add_subcommand("localize", "locate a map's image in a model");
  auto* l_map = loc->add_option("--map", map_path, "map JSON file")->required();
  auto* l_model = loc->add_option("--model", model_path, "tree-of-spaces spec")->required();
  auto* l_format = loc->add_option("--format", format, "json|text (default json)")
                       ->check(CLI::IsMember({"json", "text"}));
  auto* l_out = loc->add_option("--out", out, "output file (default stdout)");
  loc->callback([&] {
    (void)l_map;
    (void)l_model;
    config_default(cfg, l_format, "format", format);
    config_default(cfg, l_out, "out", out);
    if (format.empty()) format = "json";
    VertexMap f = map_from_json(read_file(map_path));
    LocalGraph model = space_from_file(model_path);
    LocalizationReport rep = localize_vertex_space(f, model);
    output = format == "text" ? localization_text(rep) : localization_json(rep);
  });

  try {
    // Load --config before subcommand callbacks run: parse in two passes.
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") cfg = parse_file(argv[i + 1]);
    app.parse(argc, argv);
    emit(output, out);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::internal);
  }
  return rc;
}
