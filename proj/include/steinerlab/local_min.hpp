#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinerlab/config_space.hpp"
#include "steinerlab/topology.hpp"

namespace steinerlab {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Relative contraction tolerance: edges shorter than this times the
// configuration diameter are treated as collapsed when extracting types.
inline constexpr double kContractTolRel = 1e-7;

// A straight-line realization of a topology: terminal images come from the
// configuration, interior images are free.
struct Network {
  SteinerTopology topology;
  Configuration config;
  std::vector<Vec> interior_positions;
  double length = 0.0;

  const Vec& position(int v) const {
    return topology.is_terminal(v) ? config.points[v]
                                   : interior_positions[v - topology.n];
  }
};

inline double network_length(const Network& net) {
  double total = 0.0;
  for (auto [a, b] : net.topology.edges) total += dist(net.position(a), net.position(b));
  return total;
}

inline double shortest_edge(const Network& net) {
  double best = std::numeric_limits<double>::infinity();
  for (auto [a, b] : net.topology.edges)
    best = std::min(best, dist(net.position(a), net.position(b)));
  return best;
}

namespace detail {

// Dense Cholesky for the small SPD systems that arise per sweep (k <= ~10).
// A is row-major k x k, factorized in place; rhs holds m right-hand sides of
// size k stored column-blocked (rhs[j*k + i]).
inline bool cholesky_solve(std::vector<double>& a, std::vector<double>& rhs, int k,
                           int m) {
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = a[i * k + j];
      for (int p = 0; p < j; ++p) s -= a[i * k + p] * a[j * k + p];
      if (i == j) {
        if (!(s > 0.0)) return false;
        a[i * k + i] = std::sqrt(s);
      } else {
        a[i * k + j] = s / a[j * k + j];
      }
    }
  }
  for (int c = 0; c < m; ++c) {
    double* b = rhs.data() + c * k;
    for (int i = 0; i < k; ++i) {
      double s = b[i];
      for (int p = 0; p < i; ++p) s -= a[i * k + p] * b[p];
      b[i] = s / a[i * k + i];
    }
    for (int i = k - 1; i >= 0; --i) {
      double s = b[i];
      for (int p = i + 1; p < k; ++p) s -= a[p * k + i] * b[p];
      b[i] = s / a[i * k + i];
    }
  }
  return true;
}

struct TreeSolveOutcome {
  std::vector<Vec> interior;
  double length = 0.0;
  int sweeps = 0;
  bool converged = false;
};

// Minimizes total edge length over the free (interior) vertex positions of a
// tree with fixed terminal images.  The objective is convex; the solver runs
// reweighted least-squares sweeps (each sweep re-places all interior vertices
// at once by solving one weighted Laplacian system), polishes with a damped
// Newton method on the epsilon-smoothed objective, and falls back to solving
// a contracted tree when edges collapse.
class TreeSolver {
 public:
  TreeSolver(const std::vector<Vec>& fixed, const SteinerTopology& g, double tol,
             int max_sweeps)
      : fixed_(fixed), g_(g), tol_(tol), max_sweeps_(max_sweeps), d_(0) {
    d_ = static_cast<int>(fixed.front().size());
    diam_ = 0.0;
    for (std::size_t i = 0; i < fixed.size(); ++i)
      for (std::size_t j = i + 1; j < fixed.size(); ++j)
        diam_ = std::max(diam_, dist(fixed[i], fixed[j]));
    if (diam_ <= 0.0) diam_ = 1.0;
    eps_ = 1e-12 * diam_;
  }

  TreeSolveOutcome solve(const std::vector<Vec>* init, int depth = 0) {
    const int k = g_.interior;
    TreeSolveOutcome out;
    if (k == 0) {
      out.length = raw_length({});
      out.converged = true;
      return out;
    }
    std::vector<Vec> pos;
    if (init && static_cast<int>(init->size()) == k) {
      pos = *init;
    } else {
      pos = initial_positions();
    }

    int sweeps = 0;
    auto irls_phase = [&](int cap) {
      double prev = smoothed_length(pos);
      for (int i = 0; i < cap; ++i) {
        const double moved = sweep(pos);
        ++sweeps;
        const double cur = smoothed_length(pos);
        const double decrease = prev - cur;
        prev = cur;
        if (decrease < 1e-9 * std::max(cur, eps_) && moved < 1e-6 * diam_) return true;
      }
      return false;
    };

    // Collapse handling: re-solve the contracted tree and keep the better of
    // the two answers.  The contracted optimum is an upper bound for the full
    // optimum and exact when the collapse is genuine.
    auto try_contracted = [&]() -> bool {
      if (depth >= g_.interior + 1 || !has_tiny_edge(pos)) return false;
      auto merged = solve_contracted(pos, depth);
      if (!merged || merged->length > raw_length(pos) + 1e-12 * diam_) return false;
      out.interior = std::move(merged->interior);
      out.length = merged->length;
      out.converged = merged->converged;
      return true;
    };

    // Short reweighting warmup, then the Newton polish does the real
    // convergence work; a long reweighting haul only runs when the polish
    // cannot finish (stubborn near-collapse geometry).
    irls_phase(60);
    if (try_contracted()) return out;
    bool newton_done = newton_polish(pos);
    if (try_contracted()) return out;
    if (!newton_done) {
      irls_phase(std::min(max_sweeps_, 4000) - sweeps);
      if (try_contracted()) return out;
      newton_done = newton_polish(pos);
      if (try_contracted()) return out;
    }
    out.sweeps = sweeps;

    out.interior = std::move(pos);
    out.length = raw_length(out.interior);
    out.converged = newton_done;
    return out;
  }

 private:
  const Vec& at(const std::vector<Vec>& pos, int v) const {
    return v < g_.n ? fixed_[v] : pos[v - g_.n];
  }

  std::vector<Vec> initial_positions() const {
    Vec centroid(d_, 0.0);
    for (const Vec& p : fixed_) centroid = add(std::move(centroid), p);
    centroid = scaled(std::move(centroid), 1.0 / fixed_.size());
    std::vector<Vec> pos(g_.interior, centroid);
    auto adj = adjacency(g_);
    for (int round = 0; round < 2 + g_.interior; ++round) {
      for (int i = 0; i < g_.interior; ++i) {
        Vec avg(d_, 0.0);
        const int v = g_.n + i;
        for (int w : adj[v]) avg = add(std::move(avg), at(pos, w));
        pos[i] = scaled(std::move(avg), 1.0 / adj[v].size());
      }
    }
    return pos;
  }

  double smoothed_length(const std::vector<Vec>& pos) const {
    double total = 0.0;
    for (auto [a, b] : g_.edges)
      total += std::sqrt(dist2(at(pos, a), at(pos, b)) + eps_ * eps_);
    return total;
  }

  double raw_length(const std::vector<Vec>& pos) const {
    double total = 0.0;
    for (auto [a, b] : g_.edges) total += dist(at(pos, a), at(pos, b));
    return total;
  }

  bool has_tiny_edge(const std::vector<Vec>& pos) const {
    const double thresh = 0.5 * kContractTolRel * diam_;
    for (auto [a, b] : g_.edges) {
      if (a < g_.n && b < g_.n) continue;
      if (dist(at(pos, a), at(pos, b)) < thresh) return true;
    }
    return false;
  }

  // One reweighted least-squares sweep; returns the max vertex movement.
  double sweep(std::vector<Vec>& pos) const {
    const int k = g_.interior;
    std::vector<double>& m = sweep_matrix_;
    std::vector<double>& rhs = sweep_rhs_;
    m.assign(static_cast<std::size_t>(k) * k, 0.0);
    rhs.assign(static_cast<std::size_t>(k) * d_, 0.0);
    for (auto [a, b] : g_.edges) {
      const bool ai = a >= g_.n, bi = b >= g_.n;
      if (!ai && !bi) continue;
      const double w = 1.0 / std::sqrt(dist2(at(pos, a), at(pos, b)) + eps_ * eps_);
      if (ai && bi) {
        const int i = a - g_.n, j = b - g_.n;
        m[i * k + i] += w;
        m[j * k + j] += w;
        m[i * k + j] -= w;
        m[j * k + i] -= w;
      } else {
        const int i = (ai ? a : b) - g_.n;
        const Vec& t = ai ? at(pos, b) : at(pos, a);
        m[i * k + i] += w;
        for (int c = 0; c < d_; ++c) rhs[c * k + i] += w * t[c];
      }
    }
    if (!cholesky_solve(m, rhs, k, d_))
      throw SolverError("singular reweighting system");
    double moved = 0.0;
    for (int i = 0; i < k; ++i) {
      Vec next(d_);
      for (int c = 0; c < d_; ++c) next[c] = rhs[c * k + i];
      moved = std::max(moved, dist(next, pos[i]));
      pos[i] = std::move(next);
    }
    return moved;
  }

  bool newton_polish(std::vector<Vec>& pos) const {
    const int k = g_.interior;
    const int dim = k * d_;
    std::vector<double> h(static_cast<std::size_t>(dim) * dim);
    std::vector<double> grad(dim), step(dim);
    double lambda = 0.0;
    for (int iter = 0; iter < 60; ++iter) {
      std::fill(h.begin(), h.end(), 0.0);
      std::fill(grad.begin(), grad.end(), 0.0);
      double max_diag = 0.0;
      for (auto [a, b] : g_.edges) {
        const bool ai = a >= g_.n, bi = b >= g_.n;
        if (!ai && !bi) continue;
        Vec e = sub(at(pos, a), at(pos, b));
        const double f = std::sqrt(norm2(e) + eps_ * eps_);
        const double inv = 1.0 / f, inv3 = inv * inv * inv;
        auto add_vertex = [&](int v, double sign) {
          if (v < g_.n) return;
          const int base = (v - g_.n) * d_;
          for (int c = 0; c < d_; ++c) grad[base + c] += sign * e[c] * inv;
        };
        add_vertex(a, 1.0);
        add_vertex(b, -1.0);
        auto add_block = [&](int u, int v, double sign) {
          if (u < g_.n || v < g_.n) return;
          const int bu = (u - g_.n) * d_, bv = (v - g_.n) * d_;
          for (int r = 0; r < d_; ++r)
            for (int c = 0; c < d_; ++c) {
              double val = -e[r] * e[c] * inv3;
              if (r == c) val += inv;
              h[(bu + r) * dim + (bv + c)] += sign * val;
            }
        };
        add_block(a, a, 1.0);
        add_block(b, b, 1.0);
        add_block(a, b, -1.0);
        add_block(b, a, -1.0);
      }
      double gmax = 0.0;
      for (double v : grad) gmax = std::max(gmax, std::abs(v));
      if (gmax < 1e-12) return true;
      for (int i = 0; i < dim; ++i) max_diag = std::max(max_diag, h[i * dim + i]);
      if (lambda == 0.0) lambda = 1e-11 * std::max(max_diag, 1.0);

      const double before = smoothed_length(pos);
      bool accepted = false;
      for (int inner = 0; inner < 12 && !accepted; ++inner) {
        std::vector<double> hs = h;
        for (int i = 0; i < dim; ++i) hs[i * dim + i] += lambda;
        std::vector<double> s(grad);
        for (double& v : s) v = -v;
        if (!cholesky_solve(hs, s, dim, 1)) {
          lambda = std::max(lambda * 10.0, 1e-9 * std::max(max_diag, 1.0));
          continue;
        }
        std::vector<Vec> trial = pos;
        double step_norm = 0.0;
        for (int i = 0; i < k; ++i)
          for (int c = 0; c < d_; ++c) {
            trial[i][c] += s[i * d_ + c];
            step_norm = std::max(step_norm, std::abs(s[i * d_ + c]));
          }
        // tolerate the floating noise floor of the objective so the polish
        // can keep reducing the gradient once length differences round away
        if (smoothed_length(trial) <= before * (1.0 + 1e-14)) {
          pos = std::move(trial);
          lambda *= 0.25;
          accepted = true;
          if (step_norm < 1e-15 * diam_) return true;
        } else {
          lambda = std::max(lambda * 10.0, 1e-9 * std::max(max_diag, 1.0));
        }
      }
      if (!accepted) return gmax < 1e-8;
    }
    double gmax = 0.0;
    for (double v : grad) gmax = std::max(gmax, std::abs(v));
    return gmax < 1e-8;
  }

  // Union-find merge across tiny edges (never merging two fixed vertices into
  // one class), then a recursive solve of the smaller tree.
  std::optional<TreeSolveOutcome> solve_contracted(const std::vector<Vec>& pos,
                                                   int depth) const {
    const double thresh = 0.5 * kContractTolRel * diam_;
    const int m = g_.vertex_count();
    UnionFind uf(m);
    std::vector<char> class_has_fixed(m, 0);
    for (int t = 0; t < g_.n; ++t) class_has_fixed[t] = 1;
    for (auto [a, b] : g_.edges) {
      if (dist(at(pos, a), at(pos, b)) >= thresh) continue;
      const int ra = uf.find(a), rb = uf.find(b);
      if (ra == rb) continue;
      if (class_has_fixed[ra] && class_has_fixed[rb]) continue;  // keep the tiny edge
      uf.unite(ra, rb);
      class_has_fixed[uf.find(ra)] = class_has_fixed[ra] | class_has_fixed[rb];
    }
    // Classes: fixed classes first (one per class containing a terminal).
    std::map<int, int> root_to_id;
    std::vector<Vec> new_fixed;
    for (int t = 0; t < g_.n; ++t) {
      const int root = uf.find(t);
      if (!root_to_id.count(root)) {
        root_to_id[root] = static_cast<int>(new_fixed.size());
        new_fixed.push_back(fixed_[t]);
      }
    }
    const int n_fixed = static_cast<int>(new_fixed.size());
    std::vector<int> free_roots;
    for (int v = g_.n; v < m; ++v) {
      const int root = uf.find(v);
      if (!root_to_id.count(root)) {
        root_to_id[root] = n_fixed + static_cast<int>(free_roots.size());
        free_roots.push_back(root);
      }
    }
    if (free_roots.size() == static_cast<std::size_t>(g_.interior))
      return std::nullopt;  // nothing merged

    SteinerTopology merged;
    merged.n = n_fixed;
    merged.interior = static_cast<int>(free_roots.size());
    for (auto [a, b] : g_.edges) {
      const int ca = root_to_id[uf.find(a)], cb = root_to_id[uf.find(b)];
      if (ca != cb) merged.edges.push_back({ca, cb});
    }
    std::vector<Vec> init;
    init.reserve(free_roots.size());
    for (int root : free_roots) {
      for (int v = g_.n; v < m; ++v)
        if (uf.find(v) == root) {
          init.push_back(pos[v - g_.n]);
          break;
        }
    }
    TreeSolver inner(new_fixed, merged, tol_, max_sweeps_);
    TreeSolveOutcome sub = inner.solve(&init, depth + 1);

    TreeSolveOutcome out;
    out.converged = sub.converged;
    out.sweeps = sub.sweeps;
    out.interior.resize(g_.interior);
    for (int v = g_.n; v < m; ++v) {
      const int id = root_to_id[uf.find(v)];
      out.interior[v - g_.n] = id < n_fixed ? new_fixed[id] : sub.interior[id - n_fixed];
    }
    out.length = raw_length(out.interior);
    return out;
  }

  const std::vector<Vec>& fixed_;
  const SteinerTopology& g_;
  double tol_;
  int max_sweeps_;
  int d_;
  double diam_ = 1.0;
  double eps_ = 1e-12;
  mutable std::vector<double> sweep_matrix_;
  mutable std::vector<double> sweep_rhs_;
};

}  // namespace detail

struct SolveOptions {
  double tol = 1e-10;
  int max_sweeps = 100000;
  std::vector<Vec> init;  // optional warm start for the interior positions
};

// Global minimizer of total length over interior positions for a fixed tree
// parametrization.  Edges may collapse to zero length, realizing a lower type.
inline Network minimize_fixed_topology(const Configuration& config,
                                       const SteinerTopology& g,
                                       const SolveOptions& opts = {}) {
  if (auto r = validate_configuration(config)) throw std::invalid_argument(*r);
  if (auto r = validate_topology(g)) throw std::invalid_argument(*r);
  if (g.n != config.size())
    throw std::invalid_argument("terminal count does not match configuration");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");

  detail::TreeSolver solver(config.points, g, opts.tol, opts.max_sweeps);
  detail::TreeSolveOutcome out =
      solver.solve(opts.init.empty() ? nullptr : &opts.init);
  if (!out.converged)
    throw SolverError("solver failure: no convergence after " +
                      std::to_string(out.sweeps) + " sweeps (n=" +
                      std::to_string(g.n) + ", interior=" +
                      std::to_string(g.interior) + ")");
  Network net{g, config, std::move(out.interior), out.length};
  return net;
}

// --- local minimality --------------------------------------------------------

struct LocalMinReport {
  bool degree_ok = false;
  double angle_min_deg3 = 0.0;  // smallest angle at any degree-3 vertex
  double angle_min_deg2 = 0.0;  // smallest angle at any degree-2 vertex
  double max_violation = 0.0;   // largest angle defect, radians
  bool passed = false;
};

// Checks the three properties of shortest networks: degrees at most 3 with
// interior vertices of degree exactly 3, angles of 120 degrees at degree-3
// vertices, and angles of at least 120 degrees at degree-2 vertices.
inline LocalMinReport verify_locally_minimal(const Network& net, double angle_tol) {
  const double min_len = kContractTolRel * diameter(net.config);
  for (auto [a, b] : net.topology.edges)
    if (dist(net.position(a), net.position(b)) < min_len)
      throw std::domain_error("contract before verifying: zero-length edge");

  const double third = 2.0 * M_PI / 3.0;
  LocalMinReport rep;
  rep.degree_ok = true;
  rep.angle_min_deg3 = third;
  rep.angle_min_deg2 = M_PI;
  auto adj = adjacency(net.topology);
  for (int v = 0; v < net.topology.vertex_count(); ++v) {
    const int deg = static_cast<int>(adj[v].size());
    if (deg > 3) rep.degree_ok = false;
    if (!net.topology.is_terminal(v) && deg != 3) rep.degree_ok = false;
    if (deg < 2) continue;
    std::vector<Vec> dirs;
    for (int w : adj[v]) dirs.push_back(unit(sub(net.position(w), net.position(v))));
    for (std::size_t i = 0; i < dirs.size(); ++i)
      for (std::size_t j = i + 1; j < dirs.size(); ++j) {
        const double ang = angle_between(dirs[i], dirs[j]);
        if (deg == 3) {
          rep.angle_min_deg3 = std::min(rep.angle_min_deg3, ang);
          rep.max_violation = std::max(rep.max_violation, std::abs(ang - third));
        } else {
          rep.angle_min_deg2 = std::min(rep.angle_min_deg2, ang);
          rep.max_violation = std::max(rep.max_violation, std::max(0.0, third - ang));
        }
      }
  }
  rep.passed = rep.degree_ok && rep.max_violation <= angle_tol;
  return rep;
}

// Sum of unit vectors along the edges incident to u.
inline Vec direction_vector(const Network& net, int u) {
  auto adj = adjacency(net.topology);
  const double min_len = 1e-14 * std::max(diameter(net.config), 1e-300);
  Vec sum(net.config.dim, 0.0);
  for (int w : adj[u]) {
    const Vec e = sub(net.position(w), net.position(u));
    const double len = norm(e);
    if (len <= min_len) throw std::domain_error("degenerate vertex: zero-length edge");
    sum = add(std::move(sum), scaled(e, 1.0 / len));
  }
  return sum;
}

// First derivative of length under the given terminal motions (one vector per
// terminal; interior motion does not contribute at locally minimal networks).
inline double length_derivative(const Network& net, const std::vector<Vec>& motions) {
  if (static_cast<int>(motions.size()) != net.topology.n)
    throw std::invalid_argument("need one motion vector per terminal");
  double total = 0.0;
  for (int t = 0; t < net.topology.n; ++t)
    total += dot(motions[t], direction_vector(net, t));
  return total;
}

// True when the incident edge directions agree as sets at every terminal.
inline bool are_codirected(const Network& net1, const Network& net2, double tol) {
  if (net1.topology.n != net2.topology.n || net1.config.dim != net2.config.dim)
    throw std::invalid_argument("networks span different configurations");
  const double same_tol = 1e-9 * std::max(diameter(net1.config), 1e-300);
  for (int t = 0; t < net1.topology.n; ++t)
    if (dist(net1.config.points[t], net2.config.points[t]) > same_tol)
      throw std::invalid_argument("networks span different configurations");

  auto adj1 = adjacency(net1.topology);
  auto adj2 = adjacency(net2.topology);
  for (int t = 0; t < net1.topology.n; ++t) {
    std::vector<Vec> a, b;
    for (int w : adj1[t]) a.push_back(unit(sub(net1.position(w), net1.position(t))));
    for (int w : adj2[t]) b.push_back(unit(sub(net2.position(w), net2.position(t))));
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const Vec& da : a) {
      double best = std::numeric_limits<double>::infinity();
      int arg = -1;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (used[j]) continue;
        const double d = dist(da, b[j]);
        if (d < best) {
          best = d;
          arg = static_cast<int>(j);
        }
      }
      if (arg < 0 || best > tol) return false;
      used[arg] = true;
    }
  }
  return true;
}

}  // namespace steinerlab
