#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "steinerlab/smt.hpp"

namespace steinerlab {

// --- trimming ----------------------------------------------------------------

struct TrimResult {
  Configuration config;  // S_t
  Network network;       // the trimmed network, still shortest
};

// Slides the image of a degree-1 terminal toward its neighbor:
// p_t = (1-t) p + t v.  Trimming a shortest network keeps it shortest and
// preserves uniqueness, so the trimmed network needs no re-solving.
inline TrimResult trim(const Network& net, int leaf, double t) {
  if (leaf < 0 || leaf >= net.topology.n) throw std::invalid_argument("not a terminal");
  auto adj = adjacency(net.topology);
  if (adj[leaf].size() != 1) throw std::invalid_argument("terminal is not degree-1");
  if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("t must lie in [0,1)");
  const int v = adj[leaf][0];

  TrimResult out;
  out.config = net.config;
  out.config.points[leaf] = lerp(net.position(leaf), net.position(v), t);
  if (auto r = validate_configuration(out.config))
    throw std::domain_error("degenerate: " + *r);
  out.network = net;
  out.network.config = out.config;
  out.network.length = network_length(out.network);
  return out;
}

// --- growth frames -------------------------------------------------------------

enum class PlanarSide { Left, Right };

// Anchor image, edge direction toward the neighbor, and the allowed growth
// directions.  Two-sided frames satisfy <phi,omega> = -1/2 with the second
// direction psi = -(phi+omega); one-sided frames only need <phi,omega> <= -1/2.
struct GrowthFrame {
  MoustacheSpec::Kind kind = MoustacheSpec::Kind::OneSided;
  int leaf = -1;  // the degree-1 terminal the moustache grows from
  Vec anchor;
  Vec omega;
  Vec phi;
  Vec psi;  // two-sided only
  double r = 0.0;
};

inline GrowthFrame make_growth_frame(const Network& net, int leaf,
                                     MoustacheSpec::Kind kind, double r,
                                     std::optional<PlanarSide> side = std::nullopt,
                                     std::optional<Vec> direction = std::nullopt) {
  if (leaf < 0 || leaf >= net.topology.n) throw std::invalid_argument("not a terminal");
  auto adj = adjacency(net.topology);
  if (adj[leaf].size() != 1) throw std::invalid_argument("terminal is not degree-1");
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  const int w = adj[leaf][0];
  const Vec x = net.position(leaf);
  const Vec to_w = sub(net.position(w), x);
  if (norm(to_w) <= kDistinctThreshold)
    throw std::domain_error("degenerate vertex: zero-length edge");

  GrowthFrame f;
  f.kind = kind;
  f.leaf = leaf;
  f.anchor = x;
  f.omega = unit(to_w);
  f.r = r;
  if (kind == MoustacheSpec::Kind::TwoSided) {
    if (net.config.dim == 2) {
      const PlanarSide s = side.value_or(PlanarSide::Left);
      f.phi = rotate2(f.omega, s == PlanarSide::Left ? 2.0 * M_PI / 3.0
                                                     : -2.0 * M_PI / 3.0);
    } else {
      Vec hint = direction ? *direction : any_unit_orthogonal(f.omega);
      Vec u = project_out(std::move(hint), f.omega);
      if (norm(u) <= 1e-12) u = any_unit_orthogonal(f.omega);
      u = unit(u);
      f.phi = add(scaled(f.omega, -0.5), scaled(u, std::sqrt(3.0) / 2.0));
    }
    f.psi = scaled(add(f.phi, f.omega), -1.0);
  } else {
    f.phi = direction ? unit(*direction) : scaled(f.omega, -1.0);
    if (dot(f.phi, f.omega) > -0.5 + 1e-12)
      throw std::domain_error("not allowed: direction violates <phi,omega> <= -1/2");
  }
  return f;
}

// --- growing -------------------------------------------------------------------

struct GrowResult {
  Configuration config;      // the larger configuration S
  SteinerTopology topology;  // the grown candidate type
  Network network;           // candidate network (shortest iff r is admissible)
};

// Two-sided: the anchor terminal's image is replaced by x+r*phi and x+r*psi,
// the anchor becomes interior, and the two new terminals take the anchor's
// label slot and the next one (phi first).  One-sided: a new terminal at
// x+r*phi is appended at the end of the order and connected to the anchor.
inline GrowResult grow(const Network& net, const GrowthFrame& frame) {
  const int n = net.topology.n;
  const int leaf = frame.leaf;
  const Vec p_new = add(frame.anchor, scaled(frame.phi, frame.r));

  GrowResult out;
  if (frame.kind == MoustacheSpec::Kind::TwoSided) {
    const Vec q_new = add(frame.anchor, scaled(frame.psi, frame.r));
    out.config.dim = net.config.dim;
    for (int t = 0; t < n; ++t) {
      if (t == leaf) {
        out.config.points.push_back(p_new);
        out.config.points.push_back(q_new);
      } else {
        out.config.points.push_back(net.config.points[t]);
      }
    }
    out.topology.n = n + 1;
    out.topology.interior = net.topology.interior + 1;
    // old terminal t keeps its slot (shifted past the split), old interior j
    // moves up by one slot, the anchor becomes the first interior vertex.
    auto map_vertex = [&](int v) {
      if (v == leaf) return n + 1;
      if (v < n) return v < leaf ? v : v + 1;
      return v + 2;
    };
    for (auto [a, b] : net.topology.edges)
      out.topology.edges.push_back({map_vertex(a), map_vertex(b)});
    out.topology.edges.push_back({leaf, n + 1});
    out.topology.edges.push_back({leaf + 1, n + 1});
    out.network.topology = out.topology;
    out.network.interior_positions.push_back(frame.anchor);
    for (const Vec& q : net.interior_positions) out.network.interior_positions.push_back(q);
  } else {
    out.config = net.config;
    out.config.points.push_back(p_new);
    out.topology.n = n + 1;
    out.topology.interior = net.topology.interior;
    auto map_vertex = [&](int v) { return v < n ? v : v + 1; };
    for (auto [a, b] : net.topology.edges)
      out.topology.edges.push_back({map_vertex(a), map_vertex(b)});
    out.topology.edges.push_back({n, leaf});
    out.network.topology = out.topology;
    out.network.interior_positions = net.interior_positions;
  }
  if (auto r = validate_configuration(out.config))
    throw std::domain_error("new points collide: " + *r);
  if (auto r = validate_topology(out.topology))
    throw std::logic_error("grow produced an invalid tree: " + *r);
  out.network.config = out.config;
  out.network.length = network_length(out.network);
  return out;
}

// --- admissibility threshold ----------------------------------------------------

struct R1Estimate {
  double lower = 0.0;  // largest certified-admissible radius
  double upper = 1.0;  // smallest certified-inadmissible radius, or the cap
  std::vector<std::pair<double, bool>> samples;
};

struct R1Options {
  double rel_tol = 1e-9;
  double gap_rel = 1e-3;    // bracket width relative to r_max
  double min_r_rel = 1e-9;  // give up below this times the diameter
  int budget = default_topology_budget();
  double solver_tol = 1e-10;
  bool verify_input = true;
};

namespace detail {

// Seed scan plus bisection for a monotone admissibility oracle: find the
// largest passing radius, bracketing the threshold to the requested gap.
template <class Oracle>
R1Estimate bisect_admissible(Oracle&& oracle, double r_max, double floor_r,
                             double gap) {
  R1Estimate est;
  double hi = r_max;
  double lo = r_max;
  bool found = false;
  while (lo >= floor_r) {
    const bool pass = oracle(lo);
    est.samples.push_back({lo, pass});
    if (pass) {
      found = true;
      break;
    }
    hi = lo;
    lo *= 0.5;
  }
  if (!found)
    throw SolverError("estimation failed: no admissible radius above " +
                      std::to_string(floor_r));
  if (lo == r_max) {
    est.lower = est.upper = r_max;
    return est;
  }
  while (hi - lo > gap) {
    const double mid = 0.5 * (hi + lo);
    const bool pass = oracle(mid);
    est.samples.push_back({mid, pass});
    (pass ? lo : hi) = mid;
  }
  est.lower = lo;
  est.upper = hi;
  return est;
}

}  // namespace detail

// Certified bracket for the admissibility threshold R1 by bisection on the
// radius.  A radius passes when the grown candidate network itself is the
// unique Steiner minimal tree of the grown configuration: unique verdict, the
// grown type, and the candidate length matching the solved minimum.  Trimming
// an admissible moustache keeps it admissible, so passing is monotone downward
// and the bisection is sound.  Fragile verdicts count as failures so the
// certified lower bracket stays trustworthy.
inline R1Estimate estimate_R1(const Network& net, int leaf, MoustacheSpec::Kind kind,
                              std::optional<PlanarSide> side = std::nullopt,
                              std::optional<Vec> direction = std::nullopt,
                              double r_max = 1.0, const R1Options& opts = {}) {
  r_max = std::min(r_max, 1.0);
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
  SmtOptions smt_opts{opts.rel_tol, opts.budget, opts.solver_tol};
  if (opts.verify_input) {
    SmtResult check = steiner_minimal_trees(net.config, smt_opts);
    if (check.minima.size() != 1)
      throw std::invalid_argument("input network is not an unambiguous shortest network");
  }

  // The expected signature of the grown type does not depend on the radius.
  GrowthFrame probe = make_growth_frame(net, leaf, kind, r_max, side, direction);
  const TypeSignature expected = contract_network(grow(net, probe).network).sig;

  auto oracle = [&](double r) -> bool {
    GrowthFrame f = probe;
    f.r = r;
    GrowResult grown;
    try {
      grown = grow(net, f);
    } catch (const std::domain_error&) {
      return false;  // collision at this radius
    }
    SmtResult res = steiner_minimal_trees(grown.config, smt_opts);
    return res.minima.size() == 1 && !res.fragile &&
           res.minima[0].signature == expected &&
           grown.network.length <= res.min_length * (1.0 + opts.rel_tol);
  };

  return detail::bisect_admissible(oracle, r_max,
                                   opts.min_r_rel * diameter(net.config),
                                   opts.gap_rel * r_max);
}

}  // namespace steinerlab
