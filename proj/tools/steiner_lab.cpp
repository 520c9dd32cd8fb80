// steiner_lab: Steiner minimal trees of small point sets, their combinatorial
// types, ambiguity verdicts, moustache operations, and certified paths in
// configuration space.  All I/O is JSON on files/stdin/stdout plus SVG output.
//
// Exit codes: 0 success (paths: passed), 1 usage error, 2 precondition
// violation, 3 certification or estimation failure.

#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "steinerlab/json_io.hpp"
#include "steinerlab/melzak.hpp"
#include "steinerlab/svg.hpp"

using namespace steinerlab;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::string text;
  if (path == "-") {
    std::stringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open input file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
}

Configuration read_config(const std::string& path) {
  try {
    return configuration_from_json(read_json(path));
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad configuration in ") + path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write: " + path);
  out << content;
}

int env_budget() {
  if (const char* s = std::getenv("STEINER_LAB_BUDGET")) {
    const int v = std::atoi(s);
    if (v >= 3) return v;
  }
  return default_topology_budget();
}

Vec parse_direction(const std::string& text) {
  Vec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.size() < 2) throw UsageError("direction needs at least two coordinates");
  return out;
}

// unique Steiner minimal tree of a configuration, required by the moustache
// subcommands
SmtMinimum unique_minimum(const Configuration& config, const SmtOptions& opts) {
  SmtResult res = steiner_minimal_trees(config, opts);
  if (res.minima.size() != 1)
    throw std::invalid_argument("configuration has an ambiguous Steiner minimal tree");
  return res.minima[0];
}

// --- fixtures ----------------------------------------------------------------

Configuration fixture_square() {
  return make_configuration(2, {Vec{0, 0}, Vec{1, 0}, Vec{1, 1}, Vec{0, 1}});
}

Configuration fixture_octagon() {
  std::vector<Vec> pts;
  for (int k = 0; k < 8; ++k)
    pts.push_back(Vec{std::cos(k * M_PI / 4.0), std::sin(k * M_PI / 4.0)});
  return make_configuration(2, std::move(pts));
}

// A four-point set admitting two locally minimal full networks: deterministic
// search over perturbed squares, validated by the planar construction.
Configuration fixture_fig3() {
  const std::array<std::array<double, 8>, 4> trials = {{
      {0.0, 0.0, 1.0, 0.05, 1.08, 1.02, -0.06, 0.97},
      {0.0, 0.0, 1.1, 0.0, 1.0, 1.0, 0.0, 0.9},
      {0.0, 0.0, 1.0, 0.0, 1.2, 1.1, -0.1, 1.0},
      {0.0, 0.0, 1.0, 0.0, 1.0, 1.0, -0.2, 1.2},
  }};
  for (const auto& t : trials) {
    Configuration c = make_configuration(
        2, {Vec{t[0], t[1]}, Vec{t[2], t[3]}, Vec{t[4], t[5]}, Vec{t[6], t[7]}});
    SteinerTopology ab_cd;
    ab_cd.n = 4;
    ab_cd.interior = 2;
    ab_cd.edges = {{0, 4}, {1, 4}, {2, 5}, {3, 5}, {4, 5}};
    SteinerTopology ad_bc;
    ad_bc.n = 4;
    ad_bc.interior = 2;
    ad_bc.edges = {{0, 4}, {3, 4}, {1, 5}, {2, 5}, {4, 5}};
    auto first = melzak_solve(c, ab_cd);
    auto second = melzak_solve(c, ad_bc);
    if (first && second && verify_locally_minimal(*first, 1e-6).passed &&
        verify_locally_minimal(*second, 1e-6).passed)
      return c;
  }
  throw SolverError("no fig3 fixture found in the trial family");
}

std::vector<std::pair<std::string, Configuration>> fixture_triangle_fan() {
  auto polar = [](double deg, double r) {
    return Vec{r * std::cos(deg * M_PI / 180.0), r * std::sin(deg * M_PI / 180.0)};
  };
  std::vector<std::pair<std::string, Configuration>> out;
  out.push_back({"full-ccw", make_configuration(
                                 2, {Vec{0, 0}, Vec{1, 0}, Vec{0.5, std::sqrt(3.0) / 2}})});
  out.push_back({"full-cw", make_configuration(
                                2, {Vec{1, 0}, Vec{0, 0}, Vec{0.5, std::sqrt(3.0) / 2}})});
  out.push_back({"path-A", make_configuration(2, {Vec{0, 0}, Vec{1, 0}, polar(150, 0.8)})});
  out.push_back({"path-B", make_configuration(2, {Vec{1, 0}, Vec{0, 0}, polar(150, 0.8)})});
  out.push_back({"path-C", make_configuration(2, {polar(150, 0.8), Vec{1, 0}, Vec{0, 0}})});
  for (auto& [name, config] : out) {
    Triangle3Kind kind = classify3(config);
    if (std::string(to_string(kind)) != name)
      throw SolverError("triangle-fan fixture misclassified: " + name);
  }
  return out;
}

// --- rendering dispatch --------------------------------------------------------

void render_command(const json& input, const std::string& out_prefix,
                    const RenderSpec& spec, const SmtOptions& opts) {
  if (input.contains("minima")) {
    Configuration config = configuration_from_json(input.at("config"));
    std::vector<Network> nets;
    std::vector<std::string> names;
    for (const json& m : input.at("minima")) {
      Network net = network_from_json(m.at("network"));
      net.config = config;
      net.length = network_length(net);
      nets.push_back(std::move(net));
      names.push_back(m.value("signature", ""));
    }
    write_file(out_prefix + ".svg", render_networks_svg(config, nets, names, spec));
    return;
  }
  if (input.contains("samples")) {
    CertifiedPath path = path_from_json(input);
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
      if (spec.frame >= 0 && static_cast<std::size_t>(spec.frame) != i) continue;
      SmtResult res = steiner_minimal_trees(path.samples[i], opts);
      std::vector<Network> nets;
      std::vector<std::string> names;
      for (const SmtMinimum& m : res.minima) {
        nets.push_back(m.network);
        names.push_back(m.signature);
      }
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "_%04zu", i);
      write_file(out_prefix + suffix + ".svg",
                 render_networks_svg(path.samples[i], nets, names, spec));
    }
    return;
  }
  if (input.contains("configs")) {
    std::vector<std::string> titles;
    std::vector<Configuration> configs;
    std::vector<std::vector<Network>> nets;
    for (const json& entry : input.at("configs")) {
      titles.push_back(entry.value("name", std::to_string(titles.size())));
      configs.push_back(configuration_from_json(entry.at("config")));
      std::vector<Network> panel;
      if (entry.contains("network")) {
        // an explicit network to draw (e.g. a candidate that is not the SMT)
        Network net = network_from_json(entry.at("network"));
        net.config = configs.back();
        net.length = network_length(net);
        panel.push_back(std::move(net));
      } else {
        SmtResult res = steiner_minimal_trees(configs.back(), opts);
        for (const SmtMinimum& m : res.minima) panel.push_back(m.network);
      }
      nets.push_back(std::move(panel));
    }
    write_file(out_prefix + ".svg", render_panels_svg(titles, configs, nets, spec));
    return;
  }
  if (input.contains("network")) {
    Configuration config = configuration_from_json(input.at("config"));
    Network net = network_from_json(input.at("network"));
    net.config = config;
    net.length = network_length(net);
    write_file(out_prefix + ".svg",
               render_networks_svg(config, {net}, {"network"}, spec));
    return;
  }
  if (input.contains("points")) {
    Configuration config = configuration_from_json(input);
    SmtResult res = steiner_minimal_trees(config, opts);
    std::vector<Network> nets;
    std::vector<std::string> names;
    for (const SmtMinimum& m : res.minima) {
      nets.push_back(m.network);
      names.push_back(m.signature);
    }
    write_file(out_prefix + ".svg", render_networks_svg(config, nets, names, spec));
    return;
  }
  throw UsageError("unrecognized render input: expected SmtResult, path, panel list, "
                   "network, or configuration JSON");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steiner minimal trees and their configuration space, at desk scale"};
  app.require_subcommand(1);

  double rel_tol = 1e-9;
  int budget = env_budget();
  app.add_option("--rel-tol", rel_tol, "relative tie tolerance for ambiguity verdicts");
  app.add_option("--budget", budget, "max n for full-topology enumeration");

  // solve
  auto* solve = app.add_subcommand("solve", "Steiner minimal trees of a configuration");
  std::string solve_input;
  bool melzak_check = false;
  solve->add_option("config", solve_input, "configuration JSON (file or -)")->required();
  solve->add_flag("--melzak-check", melzak_check,
                  "cross-check the minimizer against the planar construction (d=2)");

  // classify3
  auto* cls = app.add_subcommand("classify3", "five-type classification for n=3, d=2");
  std::string cls_input;
  cls->add_option("config", cls_input)->required();

  // path
  auto* path_cmd = app.add_subcommand("path", "certified path between two configurations");
  std::string path_s0, path_s1, path_type, path_out;
  int path_samples = 200;
  bool cell_mode = false;
  path_cmd->add_option("s0", path_s0)->required();
  path_cmd->add_option("s1", path_s1)->required();
  path_cmd->add_option("--type", path_type, "target type signature (default: type of s0)");
  path_cmd->add_option("--samples", path_samples, "minimum certified sample count");
  path_cmd->add_flag("--cell-mode", cell_mode, "connect inside the cell (d=2, full types)");
  path_cmd->add_option("--out", path_out, "write the path JSON to a file");

  // r1
  auto* r1_cmd = app.add_subcommand("r1", "certified admissible-radius bracket");
  std::string r1_input, r1_kind = "one", r1_side = "left", r1_dir;
  int r1_leaf = 1;
  double r1_max = 1.0, r1_gap = 1e-3;
  r1_cmd->add_option("config", r1_input)->required();
  r1_cmd->add_option("--leaf", r1_leaf, "degree-1 terminal (1-based)")->required();
  r1_cmd->add_option("--kind", r1_kind, "one | two");
  r1_cmd->add_option("--side", r1_side, "left | right (two-sided, d=2)");
  r1_cmd->add_option("--direction", r1_dir, "comma-separated direction");
  r1_cmd->add_option("--r-max", r1_max, "radius cap (at most 1)");
  r1_cmd->add_option("--gap", r1_gap, "bracket gap relative to r-max");

  // trim
  auto* trim_cmd = app.add_subcommand("trim", "trim a moustache leaf toward its neighbor");
  std::string trim_input;
  int trim_leaf = 1;
  double trim_t = 0.0;
  trim_cmd->add_option("config", trim_input)->required();
  trim_cmd->add_option("--leaf", trim_leaf, "degree-1 terminal (1-based)")->required();
  trim_cmd->add_option("--t", trim_t, "trim parameter in [0,1)")->required();

  // grow
  auto* grow_cmd = app.add_subcommand("grow", "grow a moustache at a degree-1 terminal");
  std::string grow_input, grow_kind = "one", grow_side = "left", grow_dir;
  int grow_leaf = 1;
  double grow_r = 0.0;
  grow_cmd->add_option("config", grow_input)->required();
  grow_cmd->add_option("--leaf", grow_leaf, "degree-1 terminal (1-based)")->required();
  grow_cmd->add_option("--kind", grow_kind, "one | two");
  grow_cmd->add_option("--side", grow_side, "left | right (two-sided, d=2)");
  grow_cmd->add_option("--direction", grow_dir, "comma-separated direction");
  grow_cmd->add_option("--r", grow_r, "extension radius")->required();

  // render
  auto* render_cmd = app.add_subcommand("render", "render networks or paths to SVG");
  std::string render_input, render_out = "out";
  RenderSpec spec;
  render_cmd->add_option("input", render_input)->required();
  render_cmd->add_option("--out", render_out, "output file prefix");
  render_cmd->add_option("--width", spec.width);
  render_cmd->add_option("--height", spec.height);
  render_cmd->add_option("--frame", spec.frame, "render a single path frame");
  bool no_labels = false;
  render_cmd->add_flag("--no-labels", no_labels);

  // examples
  auto* ex_cmd = app.add_subcommand("examples", "write a bundled example fixture");
  std::string ex_name, ex_dir = ".";
  unsigned ex_seed = 1;
  ex_cmd->add_option("name", ex_name, "square | octagon | ambiguous4 | triangle-fan | fig3")
      ->required();
  ex_cmd->add_option("--out", ex_dir, "output directory");
  ex_cmd->add_option("--seed", ex_seed, "seed for randomized searches");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  SmtOptions opts;
  opts.rel_tol = rel_tol;
  opts.budget = budget;

  try {
    if (*solve) {
      Configuration config = read_config(solve_input);
      SmtResult res = steiner_minimal_trees(config, opts);
      json out = to_json(res, config);
      if (melzak_check) {
        if (config.dim != 2) throw std::domain_error("melzak check needs d=2");
        double max_delta = 0.0;
        int checked = 0, infeasible = 0;
        for (const SteinerTopology& g : enumerate_full_topologies(config.size(), budget)) {
          auto exact = melzak_solve(config, g);
          if (!exact) {
            ++infeasible;
            continue;
          }
          Network numeric = minimize_fixed_topology(config, g);
          max_delta = std::max(max_delta, std::abs(exact->length - numeric.length));
          ++checked;
        }
        out["melzak_check"] = json{{"topologies_checked", checked},
                                   {"infeasible", infeasible},
                                   {"max_abs_delta", max_delta}};
      }
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*cls) {
      Configuration config = read_config(cls_input);
      const Triangle3Kind kind = classify3(config);
      json out{{"type", to_string(kind)}, {"signature", classify3_signature(kind)}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*path_cmd) {
      Configuration s0 = read_config(path_s0);
      Configuration s1 = read_config(path_s1);
      if (s0.size() != s1.size() || s0.dim != s1.dim)
        throw UsageError("endpoint configurations disagree in point count or dimension");
      PathParams params;
      params.samples = path_samples;
      params.rel_tol = rel_tol;
      params.budget = budget;
      TypeSignature target = path_type;
      if (target.empty()) {
        SmtResult res = steiner_minimal_trees(s0, opts);
        target = res.minima[0].signature;
      }
      CertifiedPath path = cell_mode ? connect_cell(s0, s1, target, params)
                                     : connect_unambiguous(s0, s1, target, params);
      json out = to_json(path);
      if (!path_out.empty())
        write_file(path_out, out.dump(2) + "\n");
      else
        std::cout << out.dump(2) << "\n";
      return path.passed ? 0 : 3;
    }

    if (*r1_cmd) {
      Configuration config = read_config(r1_input);
      SmtMinimum best = unique_minimum(config, opts);
      const MoustacheSpec::Kind kind = r1_kind == "two" ? MoustacheSpec::Kind::TwoSided
                                                        : MoustacheSpec::Kind::OneSided;
      std::optional<PlanarSide> side;
      if (config.dim == 2 && kind == MoustacheSpec::Kind::TwoSided)
        side = r1_side == "right" ? PlanarSide::Right : PlanarSide::Left;
      std::optional<Vec> dir;
      if (!r1_dir.empty()) dir = parse_direction(r1_dir);
      R1Options r1opts;
      r1opts.rel_tol = rel_tol;
      r1opts.budget = budget;
      r1opts.gap_rel = r1_gap;
      R1Estimate est = estimate_R1(best.network, r1_leaf - 1, kind, side, dir,
                                   r1_max, r1opts);
      std::cout << to_json(est).dump(2) << "\n";
      return 0;
    }

    if (*trim_cmd) {
      Configuration config = read_config(trim_input);
      SmtMinimum best = unique_minimum(config, opts);
      TrimResult tr = trim(best.network, trim_leaf - 1, trim_t);
      json out{{"config", to_json(tr.config)}, {"network", to_json(tr.network, false)}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*grow_cmd) {
      Configuration config = read_config(grow_input);
      SmtMinimum best = unique_minimum(config, opts);
      const MoustacheSpec::Kind kind = grow_kind == "two" ? MoustacheSpec::Kind::TwoSided
                                                          : MoustacheSpec::Kind::OneSided;
      std::optional<PlanarSide> side;
      if (config.dim == 2 && kind == MoustacheSpec::Kind::TwoSided)
        side = grow_side == "right" ? PlanarSide::Right : PlanarSide::Left;
      std::optional<Vec> dir;
      if (!grow_dir.empty()) dir = parse_direction(grow_dir);
      GrowthFrame frame = make_growth_frame(best.network, grow_leaf - 1, kind, grow_r,
                                            side, dir);
      GrowResult grown = grow(best.network, frame);
      json out{{"frame", to_json(frame)},
               {"config", to_json(grown.config)},
               {"topology", to_json(grown.topology)},
               {"network", to_json(grown.network, false)}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (*render_cmd) {
      spec.labels = !no_labels;
      render_command(read_json(render_input), render_out, spec, opts);
      return 0;
    }

    if (*ex_cmd) {
      auto dump_fixture = [&](const std::string& name, const json& j) {
        const std::string path = ex_dir + "/" + name + ".json";
        write_file(path, j.dump(2) + "\n");
        std::cout << path << "\n";
      };
      if (ex_name == "square") {
        json j = to_json(fixture_square());
        j["note"] = "corners of the unit square; its Steiner minimal tree is ambiguous";
        dump_fixture("square", j);
      } else if (ex_name == "octagon") {
        json j = to_json(fixture_octagon());
        j["note"] = "regular octagon, unit circumradius; eight tied shortest networks";
        dump_fixture("octagon", j);
      } else if (ex_name == "ambiguous4") {
        Ambiguous4Demo demo = ambiguous4_demo(opts);
        json j = to_json(demo);
        j["note"] = "two-type tie found by a deterministic scan over a symmetric "
                    "family of non-strictly-convex quadrilaterals";
        dump_fixture("ambiguous4", j);
      } else if (ex_name == "triangle-fan") {
        json configs = json::array();
        for (auto& [name, config] : fixture_triangle_fan())
          configs.push_back(json{{"name", name}, {"config", to_json(config)}});
        json j{{"configs", configs},
               {"note", "one representative triangle per shortest-network type"}};
        dump_fixture("triangle_fan", j);
      } else if (ex_name == "fig3") {
        json j = to_json(fixture_fig3());
        j["note"] = "four points admitting two locally minimal full networks; "
                    "found by a deterministic search over perturbed squares";
        dump_fixture("fig3", j);
      } else {
        throw UsageError("unknown example name: " + ex_name);
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetExceeded& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
