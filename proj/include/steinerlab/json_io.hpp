#pragma once

#include <string>

#include "json.hpp"
#include "steinerlab/homotopy.hpp"

namespace steinerlab {

using nlohmann::json;

// JSON formats shared by the library and the command line:
//   Configuration  {"dim": d, "points": [[x1..xd], ...]}           (terminal order)
//   Topology       {"n": n, "interior": k, "edges": [["t1","s1"], ...]}
//   Network        topology fields plus {"interior_positions": ..., "length": L}
// Vertex names are "t1".."tn" for terminals and "s1".."sk" for interior
// vertices, 1-based.

inline json to_json(const Configuration& c) {
  json points = json::array();
  for (const Vec& p : c.points) points.push_back(p);
  return json{{"dim", c.dim}, {"points", points}};
}

inline Configuration configuration_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("points"))
    throw std::invalid_argument("configuration JSON needs dim and points");
  Configuration c;
  c.dim = j.at("dim").get<int>();
  for (const json& p : j.at("points")) c.points.push_back(p.get<Vec>());
  if (auto r = validate_configuration(c))
    throw std::invalid_argument("invalid configuration: " + *r);
  return c;
}

namespace detail {

inline std::string vertex_name(const SteinerTopology& g, int v) {
  return g.is_terminal(v) ? "t" + std::to_string(v + 1)
                          : "s" + std::to_string(v - g.n + 1);
}

inline int vertex_from_name(const SteinerTopology& g, const std::string& name) {
  if (name.size() < 2 || (name[0] != 't' && name[0] != 's'))
    throw std::invalid_argument("bad vertex name: " + name);
  const int idx = std::stoi(name.substr(1)) - 1;
  if (idx < 0) throw std::invalid_argument("bad vertex name: " + name);
  return name[0] == 't' ? idx : g.n + idx;
}

}  // namespace detail

inline json to_json(const SteinerTopology& g) {
  json edges = json::array();
  for (auto [a, b] : g.edges)
    edges.push_back({detail::vertex_name(g, a), detail::vertex_name(g, b)});
  return json{{"n", g.n}, {"interior", g.interior}, {"edges", edges}};
}

inline SteinerTopology topology_from_json(const json& j) {
  SteinerTopology g;
  g.n = j.at("n").get<int>();
  g.interior = j.value("interior", 0);
  for (const json& e : j.at("edges"))
    g.edges.push_back({detail::vertex_from_name(g, e.at(0).get<std::string>()),
                       detail::vertex_from_name(g, e.at(1).get<std::string>())});
  if (auto r = validate_topology(g)) throw std::invalid_argument("invalid topology: " + *r);
  return g;
}

inline json to_json(const Network& net, bool with_config = true) {
  json j = to_json(net.topology);
  json interior = json::array();
  for (const Vec& p : net.interior_positions) interior.push_back(p);
  j["interior_positions"] = interior;
  j["length"] = net.length;
  if (with_config) j["config"] = to_json(net.config);
  return j;
}

inline Network network_from_json(const json& j) {
  Network net;
  net.topology = topology_from_json(j);
  for (const json& p : j.at("interior_positions"))
    net.interior_positions.push_back(p.get<Vec>());
  if (static_cast<int>(net.interior_positions.size()) != net.topology.interior)
    throw std::invalid_argument("interior position count mismatch");
  if (j.contains("config")) net.config = configuration_from_json(j.at("config"));
  net.length = j.value("length", 0.0);
  return net;
}

inline json to_json(const SmtResult& res, const Configuration& config) {
  json minima = json::array();
  for (const SmtMinimum& m : res.minima)
    minima.push_back(json{{"signature", m.signature},
                          {"length", m.length},
                          {"network", to_json(m.network, false)}});
  json j{{"config", to_json(config)},
         {"min_length", res.min_length},
         {"ambiguous", res.ambiguous},
         {"fragile", res.fragile},
         {"minima", minima}};
  if (std::isfinite(res.runner_up_length)) j["runner_up_length"] = res.runner_up_length;
  return j;
}

inline json to_json(const GrowthFrame& f) {
  json j{{"kind", f.kind == MoustacheSpec::Kind::TwoSided ? "two-sided" : "one-sided"},
         {"leaf", f.leaf + 1},
         {"anchor", f.anchor},
         {"omega", f.omega},
         {"phi", f.phi},
         {"r", f.r}};
  if (!f.psi.empty()) j["psi"] = f.psi;
  return j;
}

inline json to_json(const R1Estimate& est) {
  json samples = json::array();
  for (auto [r, pass] : est.samples) samples.push_back(json{{"r", r}, {"admissible", pass}});
  return json{{"lower", est.lower}, {"upper", est.upper}, {"samples", samples}};
}

inline json to_json(const SampleVerdict& v) {
  return json{{"type", v.type},
              {"target_present", v.target_present},
              {"unambiguous", v.unambiguous},
              {"fragile", v.fragile},
              {"ok", v.ok},
              {"min_length", v.min_length}};
}

inline json to_json(const CertifiedPath& path) {
  json samples = json::array();
  for (std::size_t i = 0; i < path.samples.size(); ++i)
    samples.push_back(json{{"t", path.t[i]}, {"config", to_json(path.samples[i])}});
  json verdicts = json::array();
  for (const SampleVerdict& v : path.verdicts) verdicts.push_back(to_json(v));
  json j{{"target_type", path.target_type},
         {"passed", path.passed},
         {"fragile_count", path.fragile_count},
         {"step_bound", path.step_bound},
         {"parameters",
          json{{"samples", path.params.samples},
               {"safety_factor", path.params.safety_factor},
               {"r1_probes", path.params.r1_probes},
               {"r1_gap", path.params.r1_gap},
               {"rel_tol", path.params.rel_tol},
               {"budget", path.params.budget}}},
         {"samples", samples},
         {"verdicts", verdicts}};
  if (!path.failure.empty()) j["failure"] = path.failure;
  return j;
}

inline CertifiedPath path_from_json(const json& j) {
  CertifiedPath path;
  path.target_type = j.value("target_type", std::string{});
  path.passed = j.value("passed", false);
  path.fragile_count = j.value("fragile_count", 0);
  path.step_bound = j.value("step_bound", 0.0);
  path.failure = j.value("failure", std::string{});
  for (const json& s : j.at("samples")) {
    path.t.push_back(s.at("t").get<double>());
    path.samples.push_back(configuration_from_json(s.at("config")));
  }
  if (j.contains("verdicts")) {
    for (const json& v : j.at("verdicts")) {
      SampleVerdict sv;
      sv.type = v.value("type", std::string{});
      sv.target_present = v.value("target_present", false);
      sv.unambiguous = v.value("unambiguous", false);
      sv.fragile = v.value("fragile", false);
      sv.ok = v.value("ok", false);
      sv.min_length = v.value("min_length", 0.0);
      path.verdicts.push_back(std::move(sv));
    }
  }
  return path;
}

inline json to_json(const EscapeMove& move, const Configuration& from) {
  json motions = json::array();
  for (const Vec& m : move.motions) motions.push_back(m);
  return json{{"r", move.r},
              {"motions", motions},
              {"from", to_json(from)},
              {"moved", to_json(move.moved)},
              {"margin", move.margin},
              {"after", to_json(move.after, move.moved)}};
}

inline json to_json(const Ambiguous4Demo& demo) {
  return json{{"config", to_json(demo.config)},
              {"smt", to_json(demo.smt, demo.config)},
              {"orderings", json{demo.orderings[0], demo.orderings[1]}},
              {"ordered_configs",
               json{to_json(demo.ordered[0]), to_json(demo.ordered[1])}},
              {"shared_type", demo.shared_type},
              {"alpha0", demo.alpha0},
              {"alpha1", demo.alpha1}};
}

}  // namespace steinerlab
