#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "steinerlab/local_min.hpp"

namespace steinerlab {

// Planar Melzak construction for a full topology: repeatedly replace a pair of
// leaves sharing a Steiner vertex by the equilateral third point of the pair,
// then trace the Steiner points back along the stored circumcircles.  Each
// replacement has two side choices, so all 2^(n-2) sign branches are tried and
// pruned by arc feasibility on the way back.  A feasible branch reproduces the
// locally minimal network of the topology exactly (to floating precision);
// if no branch survives, the topology is not realizable without collapse.

namespace detail {

struct MelzakMerge {
  int p = -1, q = -1;  // point nodes replaced (terminal or earlier anchor)
  int v = -1;          // Steiner vertex becoming the replacement point node
};

struct MelzakPlan {
  std::vector<MelzakMerge> merges;
  int top_a = -1, top_b = -1;  // the two point nodes left at the end
};

inline MelzakPlan melzak_plan(const SteinerTopology& g) {
  MelzakPlan plan;
  const int m = g.vertex_count();
  auto adj = adjacency(g);
  std::vector<char> active(m, 1);
  std::vector<char> is_point(m, 0);
  for (int t = 0; t < g.n; ++t) is_point[t] = 1;

  for (int step = 0; step < g.n - 2; ++step) {
    MelzakMerge merge;
    for (int v = g.n; v < m && merge.v < 0; ++v) {
      if (!active[v] || is_point[v]) continue;
      std::vector<int> pts;
      for (int w : adj[v])
        if (active[w] && is_point[w]) pts.push_back(w);
      if (pts.size() >= 2) {
        std::sort(pts.begin(), pts.end());
        merge = {pts[0], pts[1], v};
      }
    }
    if (merge.v < 0) throw std::logic_error("no cherry found in full topology");
    active[merge.p] = active[merge.q] = 0;
    is_point[merge.v] = 1;
    plan.merges.push_back(merge);
  }
  std::vector<int> rest;
  for (int v = 0; v < m; ++v)
    if (active[v]) rest.push_back(v);
  if (rest.size() != 2) throw std::logic_error("melzak reduction did not end at an edge");
  plan.top_a = rest[0];
  plan.top_b = rest[1];
  return plan;
}

inline Vec equilateral_point(const Vec& p, const Vec& q, bool left) {
  const Vec d = sub(q, p);
  return add(rotate2(d, left ? M_PI / 3.0 : -M_PI / 3.0), p);
}

struct MelzakCircle {
  Vec p, q, e, center;
  double radius = 0.0;
};

// Second intersection of the segment [e, z] with the circle through p, q, e,
// restricted to the arc opposite e.  Returns nullopt when the trace leaves the
// admissible arc or degenerates.
inline std::optional<Vec> arc_intersect(const MelzakCircle& c, const Vec& z,
                                        double scale) {
  const Vec dir = sub(z, c.e);
  const double len2 = norm2(dir);
  if (len2 <= 1e-24 * scale * scale) return std::nullopt;
  const double t = -2.0 * dot(sub(c.e, c.center), dir) / len2;
  if (!(t > 1e-12) || !(t < 1.0 - 1e-12)) return std::nullopt;
  Vec v = add(scaled(dir, t), c.e);
  const Vec pq = sub(c.q, c.p);
  const double side_v = cross2(pq, sub(v, c.p));
  const double side_e = cross2(pq, sub(c.e, c.p));
  if (!(side_v * side_e < 0.0)) return std::nullopt;
  return v;
}

}  // namespace detail

inline std::optional<Network> melzak_solve(const Configuration& config,
                                           const SteinerTopology& g) {
  if (auto r = validate_configuration(config)) throw std::invalid_argument(*r);
  if (config.dim != 2) throw std::invalid_argument("melzak construction needs d=2");
  if (!is_full_topology(g)) throw std::invalid_argument("melzak needs a full topology");
  if (g.n != config.size())
    throw std::invalid_argument("terminal count does not match configuration");
  if (g.n == 2) {
    Network net{g, config, {}, dist(config.points[0], config.points[1])};
    return net;
  }

  const detail::MelzakPlan plan = detail::melzak_plan(g);
  const int merges = static_cast<int>(plan.merges.size());
  const double diam = diameter(config);
  const int m = g.vertex_count();

  std::optional<Network> best;
  for (unsigned mask = 0; mask < (1u << merges); ++mask) {
    std::vector<Vec> epoint(m);
    std::vector<detail::MelzakCircle> circle(m);
    for (int t = 0; t < g.n; ++t) epoint[t] = config.points[t];
    bool ok = true;
    for (int i = 0; i < merges && ok; ++i) {
      const auto& mg = plan.merges[i];
      const Vec& p = epoint[mg.p];
      const Vec& q = epoint[mg.q];
      const Vec e = detail::equilateral_point(p, q, (mask >> i) & 1u);
      epoint[mg.v] = e;
      circle[mg.v] = {p, q, e, scaled(add(add(p, q), e), 1.0 / 3.0),
                      dist(p, q) / std::sqrt(3.0)};
    }
    if (!ok) continue;

    // Back-trace: place each Steiner point on its arc, walking from the top
    // edge down through the merges.
    std::vector<Vec> final_pos(m);
    for (int t = 0; t < g.n; ++t) final_pos[t] = config.points[t];
    // final positions propagate from a node's attachment point to its leaves
    auto trace = [&](auto&& self, int node, const Vec& target) -> bool {
      if (g.is_terminal(node)) return true;
      const auto it = std::find_if(plan.merges.begin(), plan.merges.end(),
                                   [&](const detail::MelzakMerge& x) { return x.v == node; });
      const std::optional<Vec> v = detail::arc_intersect(circle[node], target, diam);
      if (!v) return false;
      final_pos[node] = *v;
      return self(self, it->p, *v) && self(self, it->q, *v);
    };
    int a = plan.top_a, b = plan.top_b;
    if (g.is_terminal(a)) std::swap(a, b);
    if (!trace(trace, a, g.is_terminal(b) ? final_pos[b] : epoint[b])) continue;
    if (!g.is_terminal(b) && !trace(trace, b, final_pos[a])) continue;

    Network net;
    net.topology = g;
    net.config = config;
    net.interior_positions.assign(final_pos.begin() + g.n, final_pos.end());
    net.length = network_length(net);
    if (shortest_edge(net) < 1e-9 * diam) continue;
    LocalMinReport rep = verify_locally_minimal(net, 1e-6);
    if (!rep.passed) continue;
    if (!best || net.length < best->length) best = std::move(net);
  }
  return best;
}

}  // namespace steinerlab
