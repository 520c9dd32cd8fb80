#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "steinerlab/geometry.hpp"

namespace steinerlab {

// Thrown when an enumeration would exceed the configured topology budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A partially ordered tree: terminals 0..n-1 are labeled and ordered, interior
// vertices n..n+interior-1 are unlabeled.  Edges are unordered vertex pairs.
struct SteinerTopology {
  int n = 0;
  int interior = 0;
  std::vector<std::pair<int, int>> edges;

  int vertex_count() const { return n + interior; }
  bool is_terminal(int v) const { return v < n; }
};

using TypeSignature = std::string;

// Cyclic (counterclockwise) neighbor order per vertex, for planar types.
using PlanarOrders = std::vector<std::vector<int>>;

inline std::vector<std::vector<int>> adjacency(const SteinerTopology& g) {
  std::vector<std::vector<int>> adj(g.vertex_count());
  for (auto [a, b] : g.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

inline std::optional<std::string> validate_topology(const SteinerTopology& g) {
  if (g.n < 1) return "need at least one terminal";
  const int m = g.vertex_count();
  if (static_cast<int>(g.edges.size()) != m - 1) return "edge count is not |V|-1";
  for (auto [a, b] : g.edges)
    if (a < 0 || b < 0 || a >= m || b >= m || a == b) return "bad edge";
  // connectivity
  std::vector<int> seen(m, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  auto adj = adjacency(g);
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  if (count != m) return "graph is not connected";
  for (int v = 0; v < m; ++v) {
    const int deg = static_cast<int>(adj[v].size());
    if (g.is_terminal(v)) {
      // Shortest networks keep terminal degrees in {1,2,3}; contracted optima
      // of non-minimal topologies may exceed that, so only require >= 1.
      if (m > 1 && deg < 1) return "isolated terminal";
    } else if (deg < 3) {
      return "interior vertex of degree < 3";
    }
  }
  return std::nullopt;
}

inline bool is_full_topology(const SteinerTopology& g) {
  if (g.interior != g.n - 2) return false;
  auto adj = adjacency(g);
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int deg = static_cast<int>(adj[v].size());
    if (g.is_terminal(v) ? deg != 1 : deg != 3) return false;
  }
  return true;
}

// --- canonical type signatures ---------------------------------------------
//
// The signature is a rooted encoding with the tree rooted at terminal 0.
// Interior vertices are anonymous, so sorting child encodings makes the string
// invariant under interior relabeling while staying sensitive to terminal
// labels.  With planar orders the children are listed in counterclockwise
// order starting after the parent edge, which keeps the embedding orientation
// as part of the signature.

namespace detail {

inline std::string vertex_label(const SteinerTopology& g, int v) {
  return g.is_terminal(v) ? "T" + std::to_string(v) : "S";
}

inline std::string encode_abstract(const SteinerTopology& g,
                                   const std::vector<std::vector<int>>& adj, int v,
                                   int parent) {
  std::vector<std::string> kids;
  for (int w : adj[v])
    if (w != parent) kids.push_back(encode_abstract(g, adj, w, v));
  std::sort(kids.begin(), kids.end());
  std::string s = vertex_label(g, v);
  if (!kids.empty()) {
    s += "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ",";
      s += kids[i];
    }
    s += ")";
  }
  return s;
}

inline std::string encode_planar(const SteinerTopology& g, const PlanarOrders& orders,
                                 int v, int parent) {
  const std::vector<int>& cyc = orders[v];
  const int deg = static_cast<int>(cyc.size());
  std::vector<std::string> kids;
  if (parent >= 0) {
    int at = -1;
    for (int i = 0; i < deg; ++i)
      if (cyc[i] == parent) at = i;
    if (at < 0) throw std::invalid_argument("planar order missing parent edge");
    for (int s = 1; s < deg; ++s)
      kids.push_back(encode_planar(g, orders, cyc[(at + s) % deg], v));
  }
  std::string s = vertex_label(g, v);
  if (!kids.empty()) {
    s += "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += ",";
      s += kids[i];
    }
    s += ")";
  }
  return s;
}

}  // namespace detail

inline TypeSignature canonicalize(const SteinerTopology& g,
                                  const std::optional<PlanarOrders>& orders =
                                      std::nullopt) {
  if (auto r = validate_topology(g)) throw std::invalid_argument(*r);
  auto adj = adjacency(g);
  if (!orders) return "a;" + detail::encode_abstract(g, adj, 0, -1);

  // Root at terminal 0; its cyclic order has no parent edge, so take the
  // lexicographically smallest rotation.
  const std::vector<int>& cyc = (*orders)[0];
  if (cyc.empty()) return "p;" + detail::vertex_label(g, 0);
  std::string best;
  for (std::size_t r = 0; r < cyc.size(); ++r) {
    std::string s = detail::vertex_label(g, 0) + "(";
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      if (i) s += ",";
      s += detail::encode_planar(g, *orders, cyc[(r + i) % cyc.size()], 0);
    }
    s += ")";
    if (best.empty() || s < best) best = std::move(s);
  }
  return "p;" + best;
}

// Planar orders read off a realized straight-line network in R^2: neighbors
// sorted counterclockwise by edge direction.
inline PlanarOrders planar_orders_from_positions(const SteinerTopology& g,
                                                 const std::vector<Vec>& positions) {
  auto adj = adjacency(g);
  PlanarOrders orders(g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    std::vector<std::pair<double, int>> angled;
    for (int w : adj[v]) {
      const Vec dir = sub(positions[w], positions[v]);
      angled.emplace_back(std::atan2(dir[1], dir[0]), w);
    }
    std::sort(angled.begin(), angled.end());
    for (auto& [angle, w] : angled) orders[v].push_back(w);
  }
  return orders;
}

// --- enumeration ------------------------------------------------------------

inline int default_topology_budget() { return 9; }

// All full Steiner topologies on n ordered terminals, built by attaching each
// new terminal through a fresh interior vertex placed on every edge of every
// smaller topology.  The construction yields each full topology exactly once,
// hence (2n-5)!! of them.
inline std::vector<SteinerTopology> enumerate_full_topologies(
    int n, int budget = default_topology_budget()) {
  if (n < 3) throw std::invalid_argument("full topologies need n >= 3");
  if (n > budget)
    throw BudgetExceeded("topology enumeration budget exceeded: n = " +
                         std::to_string(n) + " > cap " + std::to_string(budget));
  SteinerTopology base;
  base.n = n;
  base.interior = 1;
  base.edges = {{0, n}, {1, n}, {2, n}};
  std::vector<SteinerTopology> current{base};
  for (int m = 4; m <= n; ++m) {
    std::vector<SteinerTopology> next;
    next.reserve(current.size() * (2 * m - 5));
    const int fresh = n + m - 3;  // interior ids are n .. n+interior-1
    for (const SteinerTopology& g : current) {
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        SteinerTopology h = g;
        auto [a, b] = h.edges[e];
        h.edges[e] = {a, fresh};
        h.edges.push_back({fresh, b});
        h.edges.push_back({fresh, m - 1});
        h.interior += 1;
        next.push_back(std::move(h));
      }
    }
    current = std::move(next);
  }
  // Interior ids used so far start at n and are contiguous; nothing to fix up.
  return current;
}

// --- contraction ------------------------------------------------------------

struct ContractResult {
  SteinerTopology type;
  std::vector<int> vertex_class;  // old vertex id -> new vertex id
  std::vector<Vec> class_positions;
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int size) : parent(size) {
    for (int i = 0; i < size; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

// Shrinks every edge whose realized length is <= tol.  Merging two distinct
// terminals is a degenerate configuration and is rejected.
inline ContractResult contract(const SteinerTopology& g,
                               const std::vector<Vec>& positions, double tol) {
  if (static_cast<int>(positions.size()) != g.vertex_count())
    throw std::invalid_argument("need one position per vertex");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  detail::UnionFind uf(g.vertex_count());
  for (auto [a, b] : g.edges)
    if (dist(positions[a], positions[b]) <= tol) uf.unite(a, b);

  std::vector<int> terminal_of_class(g.vertex_count(), -1);
  for (int t = 0; t < g.n; ++t) {
    const int root = uf.find(t);
    if (terminal_of_class[root] >= 0)
      throw std::domain_error("configuration degenerate: terminals " +
                              std::to_string(terminal_of_class[root]) + " and " +
                              std::to_string(t) + " merge");
    terminal_of_class[root] = t;
  }

  ContractResult out;
  out.type.n = g.n;
  out.vertex_class.assign(g.vertex_count(), -1);
  std::vector<int> interior_roots;
  // Assign new ids: terminal classes keep the terminal label, interior classes
  // are numbered by smallest member id.
  std::vector<int> root_to_new(g.vertex_count(), -1);
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int root = uf.find(v);
    if (terminal_of_class[root] >= 0) root_to_new[root] = terminal_of_class[root];
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    const int root = uf.find(v);
    if (root_to_new[root] < 0) {
      root_to_new[root] = g.n + static_cast<int>(interior_roots.size());
      interior_roots.push_back(root);
    }
  }
  out.type.interior = static_cast<int>(interior_roots.size());
  for (int v = 0; v < g.vertex_count(); ++v) out.vertex_class[v] = root_to_new[uf.find(v)];

  std::set<std::pair<int, int>> dedup;
  for (auto [a, b] : g.edges) {
    int ca = out.vertex_class[a], cb = out.vertex_class[b];
    if (ca == cb) continue;
    if (ca > cb) std::swap(ca, cb);
    dedup.insert({ca, cb});
  }
  out.type.edges.assign(dedup.begin(), dedup.end());

  out.class_positions.assign(out.type.vertex_count(), Vec{});
  for (int t = 0; t < g.n; ++t) out.class_positions[t] = positions[t];
  for (std::size_t i = 0; i < interior_roots.size(); ++i) {
    // Representative position: smallest original member of the class.
    int rep = -1;
    for (int v = 0; v < g.vertex_count(); ++v)
      if (uf.find(v) == interior_roots[i] && (rep < 0 || v < rep)) rep = v;
    out.class_positions[g.n + static_cast<int>(i)] = positions[rep];
  }
  return out;
}

// --- moustaches -------------------------------------------------------------

struct MoustacheSpec {
  enum class Kind { OneSided, TwoSided };
  Kind kind = Kind::OneSided;
  int anchor = -1;  // vertex id in the host topology
  int leaf_p = -1;  // terminal label; for two-sided, leaf_p < leaf_q
  int leaf_q = -1;  // two-sided only
};

// All one- and two-sided moustaches of a tree: a leaf adjacent to a degree-2
// vertex, or two leaves adjacent to a common degree-3 vertex.  Sorted by
// (smallest leaf, kind, second leaf) so that downstream choices are
// deterministic.
inline std::vector<MoustacheSpec> find_moustaches(const SteinerTopology& g) {
  auto adj = adjacency(g);
  std::vector<MoustacheSpec> out;
  for (int v = 0; v < g.vertex_count(); ++v) {
    std::vector<int> leaves;
    for (int w : adj[v])
      if (adj[w].size() == 1) leaves.push_back(w);
    if (adj[v].size() == 2) {
      for (int p : leaves)
        out.push_back({MoustacheSpec::Kind::OneSided, v, p, -1});
    } else if (adj[v].size() == 3) {
      for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j)
          out.push_back({MoustacheSpec::Kind::TwoSided, v,
                         std::min(leaves[i], leaves[j]),
                         std::max(leaves[i], leaves[j])});
    }
  }
  std::sort(out.begin(), out.end(), [](const MoustacheSpec& a, const MoustacheSpec& b) {
    const int aq = a.leaf_q < 0 ? -1 : a.leaf_q;
    const int bq = b.leaf_q < 0 ? -1 : b.leaf_q;
    return std::tie(a.leaf_p, aq, a.anchor) < std::tie(b.leaf_p, bq, b.anchor);
  });
  return out;
}

// Result of shaving a moustache, with the label bookkeeping needed to map
// configurations between the two configuration spaces.
struct ShaveResult {
  SteinerTopology topology;
  MoustacheSpec moustache;
  bool anchor_was_terminal = false;
  int anchor_new_label = -1;           // terminal label of the anchor afterwards
  std::vector<int> terminal_map;       // old terminal label -> new label, -1 if removed
  std::vector<int> vertex_map;         // old vertex id -> new vertex id, -1 if removed
};

namespace detail {

inline void check_moustache(const SteinerTopology& g, const MoustacheSpec& m) {
  auto adj = adjacency(g);
  auto has_edge = [&](int a, int b) {
    for (int w : adj[a])
      if (w == b) return true;
    return false;
  };
  if (m.leaf_p < 0 || m.leaf_p >= g.n || adj[m.leaf_p].size() != 1 ||
      !has_edge(m.leaf_p, m.anchor))
    throw std::invalid_argument("not a moustache of this topology");
  if (m.kind == MoustacheSpec::Kind::OneSided) {
    if (adj[m.anchor].size() != 2)
      throw std::invalid_argument("one-sided moustache needs a degree-2 anchor");
  } else {
    if (adj[m.anchor].size() != 3 || m.leaf_q < 0 || m.leaf_q >= g.n ||
        adj[m.leaf_q].size() != 1 || !has_edge(m.leaf_q, m.anchor))
      throw std::invalid_argument("two-sided moustache needs two leaves at a degree-3 anchor");
  }
}

}  // namespace detail

// Shaving removes the moustache leaves.  One-sided: the anchor keeps its
// terminal label.  Two-sided with an interior anchor: the anchor becomes a
// terminal and takes the smaller of the removed labels; remaining terminals
// are renumbered order-preservingly.  Two-sided with a terminal anchor keeps
// the anchor's own label.
inline ShaveResult shave(const SteinerTopology& g, const MoustacheSpec& m) {
  detail::check_moustache(g, m);
  ShaveResult out;
  out.moustache = m;
  out.anchor_was_terminal = g.is_terminal(m.anchor);

  const bool two = m.kind == MoustacheSpec::Kind::TwoSided;
  std::vector<bool> removed(g.vertex_count(), false);
  removed[m.leaf_p] = true;
  if (two) removed[m.leaf_q] = true;

  // New terminal order: old terminals minus removed leaves, with an interior
  // anchor inserted at the smaller removed label's slot.
  std::vector<int> new_terminals;  // old vertex ids in the new order
  for (int t = 0; t < g.n; ++t) {
    if (removed[t]) {
      if (two && !out.anchor_was_terminal && t == m.leaf_p) new_terminals.push_back(m.anchor);
      continue;
    }
    new_terminals.push_back(t);
  }

  out.topology.n = static_cast<int>(new_terminals.size());
  out.terminal_map.assign(g.n, -1);
  out.vertex_map.assign(g.vertex_count(), -1);
  for (std::size_t i = 0; i < new_terminals.size(); ++i) {
    out.vertex_map[new_terminals[i]] = static_cast<int>(i);
    if (g.is_terminal(new_terminals[i]))
      out.terminal_map[new_terminals[i]] = static_cast<int>(i);
  }
  int next_interior = out.topology.n;
  for (int v = g.n; v < g.vertex_count(); ++v) {
    if (removed[v] || out.vertex_map[v] >= 0) continue;
    out.vertex_map[v] = next_interior++;
  }
  out.topology.interior = next_interior - out.topology.n;
  out.anchor_new_label = out.vertex_map[m.anchor];

  for (auto [a, b] : g.edges) {
    if (removed[a] || removed[b]) continue;
    out.topology.edges.push_back({out.vertex_map[a], out.vertex_map[b]});
  }
  if (auto r = validate_topology(out.topology))
    throw std::logic_error("shave produced an invalid tree: " + *r);
  return out;
}

}  // namespace steinerlab
