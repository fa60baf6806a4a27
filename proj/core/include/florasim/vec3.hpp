#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace florasim {

// All world-space coordinates are millimeters.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0.0 ? v * (1.0 / n) : Vec3{0.0, 0.0, 0.0};
}

// Axis-aligned box, inclusive on all faces.
struct Box {
  Vec3 min;
  Vec3 max;

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
  }
};

// Parameter interval [t0, t1] of the segment a + t*(b - a), t in [0, 1], lying
// inside the box, or nullopt when the segment misses it.
inline std::optional<std::pair<double, double>> clip_segment(const Box& box, const Vec3& a,
                                                             const Vec3& b) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double av[3] = {a.x, a.y, a.z};
  const double bv[3] = {b.x, b.y, b.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};
  for (int axis = 0; axis < 3; ++axis) {
    double d = bv[axis] - av[axis];
    if (std::abs(d) < 1e-12) {
      if (av[axis] < lo[axis] || av[axis] > hi[axis]) return std::nullopt;
      continue;
    }
    double ta = (lo[axis] - av[axis]) / d;
    double tb = (hi[axis] - av[axis]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

}  // namespace florasim
