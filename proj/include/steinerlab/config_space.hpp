#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "steinerlab/geometry.hpp"

namespace steinerlab {

// Pairwise distance below which two points count as coincident.
inline constexpr double kDistinctThreshold = 1e-12;

// An ordered list of n distinct points in R^d.  Flattening the coordinates in
// sequence identifies it with a point of R^{nd} off the coincidence planes.
struct Configuration {
  int dim = 0;
  std::vector<Vec> points;

  int size() const { return static_cast<int>(points.size()); }
};

using ConfigVector = std::vector<double>;

inline std::optional<std::string> validate_configuration(const Configuration& c) {
  if (c.dim < 2) return "dimension must be at least 2";
  if (c.points.empty()) return "configuration needs at least one point";
  for (const Vec& p : c.points) {
    if (static_cast<int>(p.size()) != c.dim) return "point dimension mismatch";
    if (!all_finite(p)) return "non-finite coordinate";
  }
  for (std::size_t i = 0; i < c.points.size(); ++i)
    for (std::size_t j = i + 1; j < c.points.size(); ++j)
      if (dist(c.points[i], c.points[j]) <= kDistinctThreshold)
        return "points " + std::to_string(i) + " and " + std::to_string(j) +
               " coincide";
  return std::nullopt;
}

inline Configuration make_configuration(int dim, std::vector<Vec> points) {
  Configuration c{dim, std::move(points)};
  if (auto reason = validate_configuration(c)) throw std::invalid_argument(*reason);
  return c;
}

inline double diameter(const Configuration& c) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.points.size(); ++i)
    for (std::size_t j = i + 1; j < c.points.size(); ++j)
      best = std::max(best, dist(c.points[i], c.points[j]));
  return best;
}

inline ConfigVector flatten(const Configuration& c) {
  ConfigVector v;
  v.reserve(static_cast<std::size_t>(c.size()) * c.dim);
  for (const Vec& p : c.points) v.insert(v.end(), p.begin(), p.end());
  return v;
}

inline Configuration unflatten(const ConfigVector& v, int dim) {
  if (dim < 1 || v.size() % static_cast<std::size_t>(dim) != 0)
    throw std::invalid_argument("flat vector length is not a multiple of dim");
  Configuration c;
  c.dim = dim;
  for (std::size_t i = 0; i < v.size(); i += dim)
    c.points.emplace_back(v.begin() + i, v.begin() + i + dim);
  return c;
}

// Euclidean distance between two configurations viewed as points of R^{nd}.
inline double config_distance(const Configuration& a, const Configuration& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) s += dist2(a.points[i], b.points[i]);
  return std::sqrt(s);
}

// Distance from the flattened configuration to the nearest coincidence plane,
// which comes out as the smallest pairwise distance divided by sqrt(2).
inline double diagonal_distance(const Configuration& c) {
  if (c.size() < 2) throw std::domain_error("no diagonal planes for n < 2");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.points.size(); ++i)
    for (std::size_t j = i + 1; j < c.points.size(); ++j)
      best = std::min(best, dist(c.points[i], c.points[j]));
  return best / std::sqrt(2.0);
}

namespace detail {

inline std::vector<Configuration> sample_segment(const Configuration& a,
                                                 const Configuration& b, int samples) {
  std::vector<Configuration> out;
  out.reserve(samples);
  for (int s = 0; s < samples; ++s) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(s) / (samples - 1);
    Configuration c;
    c.dim = a.dim;
    c.points.reserve(a.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
      c.points.push_back(lerp(a.points[i], b.points[i], t));
    out.push_back(std::move(c));
  }
  return out;
}

inline double min_diagonal_distance(const std::vector<Configuration>& path) {
  double best = std::numeric_limits<double>::infinity();
  for (const Configuration& c : path) best = std::min(best, diagonal_distance(c));
  return best;
}

}  // namespace detail

// Piecewise-linear path between two small configurations (n <= 2) that keeps a
// positive distance to the coincidence planes.  These are the base cases of
// the recursive path construction; for n = 2 a single detour waypoint is
// inserted when the straight segment would pass too close to coincidence.
inline std::vector<Configuration> interpolate_off_diagonal(const Configuration& c0,
                                                           const Configuration& c1,
                                                           double clearance,
                                                           int samples = 33) {
  if (auto r = validate_configuration(c0)) throw std::invalid_argument(*r);
  if (auto r = validate_configuration(c1)) throw std::invalid_argument(*r);
  if (c0.size() != c1.size() || c0.dim != c1.dim)
    throw std::invalid_argument("endpoint size mismatch");
  if (c0.size() > 2) throw std::invalid_argument("base-case path requires n <= 2");
  if (!(clearance > 0.0)) throw std::invalid_argument("clearance must be positive");
  if (samples < 2) samples = 2;

  if (c0.size() == 1) return detail::sample_segment(c0, c1, samples);

  const double required =
      std::min({clearance, diagonal_distance(c0), diagonal_distance(c1)});

  // Closest approach of |a(t) - b(t)| along the straight segment.
  const Vec u = sub(c0.points[0], c0.points[1]);
  const Vec motion = sub(sub(c1.points[0], c1.points[1]), u);
  double min_gap;
  if (norm(motion) <= kDistinctThreshold) {
    min_gap = norm(u);
  } else {
    double t_star = -dot(u, motion) / norm2(motion);
    t_star = std::clamp(t_star, 0.0, 1.0);
    min_gap = norm(add(scaled(motion, t_star), u));
  }
  if (min_gap / std::sqrt(2.0) >= required * (1.0 - 1e-12))
    return detail::sample_segment(c0, c1, samples);

  // Detour: displace point 2 at the midpoint waypoint, orthogonally to the
  // coincidence direction, along the first coordinate axis not parallel to it.
  const Vec w_hat = unit(motion);
  int axis = 0;
  for (int k = 0; k < c0.dim; ++k) {
    if (std::abs(w_hat[k]) < 1.0 - 1e-9) {
      axis = k;
      break;
    }
  }
  Vec e(c0.dim, 0.0);
  e[axis] = 1.0;
  e = unit(project_out(std::move(e), w_hat));

  const double base = std::max(clearance, 0.5 * std::min(diagonal_distance(c0),
                                                          diagonal_distance(c1)));
  double displacement = base * std::sqrt(2.0);
  const int half = std::max(samples / 2, 2);
  for (int attempt = 0; attempt < 60; ++attempt) {
    Configuration mid;
    mid.dim = c0.dim;
    mid.points = {lerp(c0.points[0], c1.points[0], 0.5),
                  add(lerp(c0.points[1], c1.points[1], 0.5), scaled(e, displacement))};
    std::vector<Configuration> path = detail::sample_segment(c0, mid, half);
    std::vector<Configuration> second = detail::sample_segment(mid, c1, half);
    path.insert(path.end(), second.begin() + 1, second.end());
    if (detail::min_diagonal_distance(path) >= required * (1.0 - 1e-9)) return path;
    displacement *= 2.0;
  }
  throw std::runtime_error("could not construct an off-diagonal detour");
}

}  // namespace steinerlab
