#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace steinerlab {

// Points and directions in R^d are plain coordinate vectors; d is a runtime
// quantity because the library supports arbitrary dimension >= 2.
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

inline Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec sub(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec scaled(Vec a, double s) {
  for (double& x : a) x *= s;
  return a;
}

inline Vec lerp(const Vec& a, const Vec& b, double t) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (1.0 - t) * a[i] + t * b[i];
  return r;
}

inline Vec unit(const Vec& a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw std::domain_error("zero-length direction");
  return scaled(a, 1.0 / n);
}

inline bool all_finite(const Vec& a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

// --- planar helpers -------------------------------------------------------

inline double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

inline Vec rotate2(const Vec& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return Vec{c * v[0] - s * v[1], s * v[0] + c * v[1]};
}

// Counterclockwise angle from a to b, in [0, 2*pi).
inline double ccw_angle(const Vec& a, const Vec& b) {
  double t = std::atan2(cross2(a, b), dot(a, b));
  if (t < 0.0) t += 2.0 * M_PI;
  return t;
}

// Interior angle between two directions, in [0, pi].
inline double angle_between(const Vec& a, const Vec& b) {
  const double c = std::clamp(dot(unit(a), unit(b)), -1.0, 1.0);
  return std::acos(c);
}

// --- general-dimension helpers -------------------------------------------

// Component of v orthogonal to the unit vector axis.
inline Vec project_out(Vec v, const Vec& axis) {
  const double c = dot(v, axis);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * axis[i];
  return v;
}

// Deterministic unit vector orthogonal to the unit vector axis: take the
// coordinate axis with the smallest |component| along axis and project.
inline Vec any_unit_orthogonal(const Vec& axis) {
  std::size_t best = 0;
  double best_abs = std::abs(axis[0]);
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (std::abs(axis[i]) < best_abs) {
      best_abs = std::abs(axis[i]);
      best = i;
    }
  }
  Vec e(axis.size(), 0.0);
  e[best] = 1.0;
  return unit(project_out(std::move(e), axis));
}

}  // namespace steinerlab
