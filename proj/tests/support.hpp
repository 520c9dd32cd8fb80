#pragma once

#include <limits>
#include <random>
#include <vector>

#include "steinerlab/config_space.hpp"
#include "steinerlab/local_min.hpp"

// Shared test utilities: seeded generators and independent oracles used to
// freeze expected values (grid searches, spanning-tree bounds, closed forms).

namespace testsupport {

using steinerlab::Configuration;
using steinerlab::SteinerTopology;
using steinerlab::Vec;

inline std::mt19937& rng(unsigned seed = 0) {
  static std::mt19937 gen(12345);
  if (seed) gen.seed(seed);
  return gen;
}

// Random configuration with a minimum pairwise separation, so solver and type
// extraction tolerances stay far from the coincidence planes.
inline Configuration random_config(int n, int d, std::mt19937& gen,
                                   double min_sep = 1e-2) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (;;) {
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) {
      Vec p(d);
      for (int c = 0; c < d; ++c) p[c] = coord(gen);
      pts.push_back(std::move(p));
    }
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j)
        if (steinerlab::dist(pts[i], pts[j]) < min_sep) ok = false;
    if (ok) return steinerlab::make_configuration(d, std::move(pts));
  }
}

// Length of the Euclidean minimum spanning tree (Prim); every spanning tree is
// a feasible network, so this bounds the Steiner minimal length from above.
inline double mst_length(const Configuration& c) {
  const int n = c.size();
  std::vector<bool> used(n, false);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  used[0] = true;
  for (int j = 1; j < n; ++j) best[j] = steinerlab::dist(c.points[0], c.points[j]);
  double total = 0.0;
  for (int round = 1; round < n; ++round) {
    int arg = -1;
    for (int j = 0; j < n; ++j)
      if (!used[j] && (arg < 0 || best[j] < best[arg])) arg = j;
    total += best[arg];
    used[arg] = true;
    for (int j = 0; j < n; ++j)
      if (!used[j]) best[j] = std::min(best[j], steinerlab::dist(c.points[arg], c.points[j]));
  }
  return total;
}

// Independent oracle for single-Steiner-point problems: iteratively refined
// grid search for min over x of sum_i |x - p_i|.
inline double fermat_length_grid(const std::vector<Vec>& pts) {
  const int d = static_cast<int>(pts[0].size());
  Vec lo(d, std::numeric_limits<double>::infinity());
  Vec hi(d, -std::numeric_limits<double>::infinity());
  for (const Vec& p : pts)
    for (int c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  auto objective = [&](const Vec& x) {
    double s = 0.0;
    for (const Vec& p : pts) s += steinerlab::dist(x, p);
    return s;
  };
  Vec center(d);
  for (int c = 0; c < d; ++c) center[c] = 0.5 * (lo[c] + hi[c]);
  double span = 0.0;
  for (int c = 0; c < d; ++c) span = std::max(span, hi[c] - lo[c]);
  double best = objective(center);
  for (int round = 0; round < 60; ++round) {
    Vec improved = center;
    const int steps = 8;
    if (d == 2) {
      for (int i = -steps; i <= steps; ++i)
        for (int j = -steps; j <= steps; ++j) {
          Vec x{center[0] + span * i / steps, center[1] + span * j / steps};
          const double v = objective(x);
          if (v < best) {
            best = v;
            improved = x;
          }
        }
    } else {
      for (int i = -steps; i <= steps; ++i)
        for (int j = -steps; j <= steps; ++j)
          for (int k = -steps; k <= steps; ++k) {
            Vec x{center[0] + span * i / steps, center[1] + span * j / steps,
                  center[2] + span * k / steps};
            const double v = objective(x);
            if (v < best) {
              best = v;
              improved = x;
            }
          }
    }
    center = improved;
    span *= 0.5;
  }
  return best;
}

inline Configuration equilateral_triangle() {
  return steinerlab::make_configuration(
      2, {Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{0.5, std::sqrt(3.0) / 2.0}});
}

inline Configuration unit_square() {
  return steinerlab::make_configuration(
      2, {Vec{0.0, 0.0}, Vec{1.0, 0.0}, Vec{1.0, 1.0}, Vec{0.0, 1.0}});
}

inline Configuration regular_octagon() {
  std::vector<Vec> pts;
  for (int k = 0; k < 8; ++k)
    pts.push_back(Vec{std::cos(k * M_PI / 4.0), std::sin(k * M_PI / 4.0)});
  return steinerlab::make_configuration(2, std::move(pts));
}

}  // namespace testsupport
