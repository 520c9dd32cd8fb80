#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steinerlab/local_min.hpp"

namespace steinerlab {

struct SmtOptions {
  double rel_tol = 1e-9;
  int budget = default_topology_budget();
  double solver_tol = 1e-10;
};

// Near-ties beyond rel_tol but within this relative window are flagged as
// fragile: an exact tie cannot be certified in floating point and such
// verdicts should be treated with care.
inline constexpr double kFragileRel = 1e-6;

struct SmtMinimum {
  TypeSignature signature;
  double length = 0.0;
  Network network;  // realized representative; topology is the contracted type
};

struct SmtResult {
  std::vector<SmtMinimum> minima;  // sorted by signature
  double min_length = 0.0;
  bool ambiguous = false;
  bool fragile = false;
  // best length among types outside the minima set (infinity if none)
  double runner_up_length = std::numeric_limits<double>::infinity();
};

// Contracts a realized network to its combinatorial type.  In the plane the
// type carries the cyclic edge orders of the embedding.
struct TypedNetwork {
  Network net;
  TypeSignature sig;
};

inline TypedNetwork contract_network(const Network& raw) {
  const double tol = kContractTolRel * diameter(raw.config);
  std::vector<Vec> positions;
  positions.reserve(raw.topology.vertex_count());
  for (int v = 0; v < raw.topology.vertex_count(); ++v) positions.push_back(raw.position(v));
  ContractResult c = contract(raw.topology, positions, tol);

  TypedNetwork out;
  out.net.topology = c.type;
  out.net.config = raw.config;
  out.net.interior_positions.assign(c.class_positions.begin() + c.type.n,
                                    c.class_positions.end());
  out.net.length = network_length(out.net);
  if (raw.config.dim == 2)
    out.sig = canonicalize(c.type, planar_orders_from_positions(c.type, c.class_positions));
  else
    out.sig = canonicalize(c.type);
  return out;
}

// Realizes a known (possibly non-full) type over a configuration by direct
// convex minimization of its parametrization.
inline Network realize_type(const Configuration& config, const SteinerTopology& type,
                            double tol = 1e-10) {
  SolveOptions opts;
  opts.tol = tol;
  return minimize_fixed_topology(config, type, opts);
}

namespace detail {

inline SteinerTopology trivial_topology(int n) {
  SteinerTopology g;
  g.n = n;
  if (n == 2) g.edges = {{0, 1}};
  return g;
}

}  // namespace detail

// Exhaustive Steiner-minimal-tree computation: minimize over every full
// topology (collapses allowed), contract each optimum to its type, group by
// type signature, and report every type whose minimum ties the global minimum
// within rel_tol.
inline SmtResult steiner_minimal_trees(const Configuration& config,
                                       const SmtOptions& opts = {}) {
  if (auto r = validate_configuration(config)) throw std::invalid_argument(*r);
  const int n = config.size();
  SmtResult res;

  if (n <= 2) {
    SteinerTopology g = detail::trivial_topology(n);
    Network net{g, config, {}, 0.0};
    net.length = network_length(net);
    std::optional<PlanarOrders> orders;
    if (config.dim == 2) orders = planar_orders_from_positions(g, config.points);
    res.minima.push_back({canonicalize(g, orders), net.length, std::move(net)});
    res.min_length = res.minima[0].length;
    return res;
  }

  std::map<TypeSignature, std::pair<double, Network>> by_type;
  for (const SteinerTopology& g : enumerate_full_topologies(n, opts.budget)) {
    SolveOptions solve_opts;
    solve_opts.tol = opts.solver_tol;
    Network raw = minimize_fixed_topology(config, g, solve_opts);
    TypedNetwork typed = contract_network(raw);
    auto it = by_type.find(typed.sig);
    if (it == by_type.end() || typed.net.length < it->second.first)
      by_type[typed.sig] = {typed.net.length, std::move(typed.net)};
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [sig, entry] : by_type) best = std::min(best, entry.first);
  res.min_length = best;
  for (auto& [sig, entry] : by_type) {
    if (entry.first <= best * (1.0 + opts.rel_tol)) {
      res.minima.push_back({sig, entry.first, std::move(entry.second)});
    } else {
      res.runner_up_length = std::min(res.runner_up_length, entry.first);
      if (entry.first <= best * (1.0 + kFragileRel)) res.fragile = true;
    }
  }
  res.ambiguous = res.minima.size() > 1;
  return res;
}

inline std::pair<bool, SmtResult> is_unambiguous(const Configuration& config,
                                                 const SmtOptions& opts = {}) {
  SmtResult res = steiner_minimal_trees(config, opts);
  return {res.minima.size() == 1, std::move(res)};
}

enum class CellMembership { UnambiguousInterior, Ambiguous, Outside };

inline CellMembership cell_membership(const Configuration& config,
                                      const TypeSignature& sig,
                                      const SmtOptions& opts = {}) {
  SmtResult res = steiner_minimal_trees(config, opts);
  bool present = false;
  for (const SmtMinimum& m : res.minima) present |= (m.signature == sig);
  if (!present) return CellMembership::Outside;
  return res.ambiguous ? CellMembership::Ambiguous : CellMembership::UnambiguousInterior;
}

// --- the five types for three points in the plane ----------------------------

enum class Triangle3Kind { FullCcw, FullCw, PathA, PathB, PathC };

inline const char* to_string(Triangle3Kind k) {
  switch (k) {
    case Triangle3Kind::FullCcw: return "full-ccw";
    case Triangle3Kind::FullCw: return "full-cw";
    case Triangle3Kind::PathA: return "path-A";
    case Triangle3Kind::PathB: return "path-B";
    case Triangle3Kind::PathC: return "path-C";
  }
  return "?";
}

inline TypeSignature classify3_signature(Triangle3Kind kind) {
  switch (kind) {
    case Triangle3Kind::FullCcw:
    case Triangle3Kind::FullCw: {
      SteinerTopology star;
      star.n = 3;
      star.interior = 1;
      star.edges = {{0, 3}, {1, 3}, {2, 3}};
      PlanarOrders orders(4);
      orders[0] = {3};
      orders[1] = {3};
      orders[2] = {3};
      orders[3] = kind == Triangle3Kind::FullCcw ? std::vector<int>{0, 1, 2}
                                                 : std::vector<int>{0, 2, 1};
      return canonicalize(star, orders);
    }
    case Triangle3Kind::PathA:
    case Triangle3Kind::PathB:
    case Triangle3Kind::PathC: {
      const int mid = kind == Triangle3Kind::PathA ? 0 : kind == Triangle3Kind::PathB ? 1 : 2;
      const int a = mid == 0 ? 1 : 0;
      const int b = mid == 2 ? 1 : 2;
      SteinerTopology path;
      path.n = 3;
      path.edges = {{a, mid}, {mid, b}};
      PlanarOrders orders(3);
      orders[a] = {mid};
      orders[b] = {mid};
      orders[mid] = {a, b};
      return canonicalize(path, orders);
    }
  }
  throw std::logic_error("unreachable");
}

// Classifies a planar triple by angles and orientation.  Angles of exactly
// 120 degrees resolve to the path type, matching the boundary behavior of the
// cells: on the membrane the shortest network is the two-edge path.
inline Triangle3Kind classify3(const Configuration& config) {
  if (auto r = validate_configuration(config)) throw std::invalid_argument(*r);
  if (config.size() != 3 || config.dim != 2)
    throw std::invalid_argument("classify3 needs n=3, d=2");
  const Vec& a = config.points[0];
  const Vec& b = config.points[1];
  const Vec& c = config.points[2];
  const double third = 2.0 * M_PI / 3.0;
  if (angle_between(sub(b, a), sub(c, a)) >= third) return Triangle3Kind::PathA;
  if (angle_between(sub(a, b), sub(c, b)) >= third) return Triangle3Kind::PathB;
  if (angle_between(sub(a, c), sub(b, c)) >= third) return Triangle3Kind::PathC;
  return cross2(sub(b, a), sub(c, a)) > 0.0 ? Triangle3Kind::FullCcw
                                            : Triangle3Kind::FullCw;
}

}  // namespace steinerlab
