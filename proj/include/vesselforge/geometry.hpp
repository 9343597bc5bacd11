#pragma once

// Segment predicates used by the growth stage's spatial validity checks.

#include <algorithm>
#include <cmath>

#include "vesselforge/core.hpp"

namespace vesselforge {

namespace detail {

inline double orient2d(const Vec2& p, const Vec2& q, const Vec2& r) {
  return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
}

// r collinear with pq: does r lie on the closed segment pq?
inline bool on_segment2d(const Vec2& p, const Vec2& q, const Vec2& r) {
  return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
         std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
}

}  // namespace detail

// True iff the closed segments p1p2 and p3p4 share at least one point.
// Full four-orientation test with collinear handling; endpoint touching
// counts as intersection.
inline bool segments_intersect_2d(const Vec2& p1, const Vec2& p2, const Vec2& p3, const Vec2& p4) {
  const double d1 = detail::orient2d(p3, p4, p1);
  const double d2 = detail::orient2d(p3, p4, p2);
  const double d3 = detail::orient2d(p1, p2, p3);
  const double d4 = detail::orient2d(p1, p2, p4);

  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && detail::on_segment2d(p3, p4, p1)) return true;
  if (d2 == 0 && detail::on_segment2d(p3, p4, p2)) return true;
  if (d3 == 0 && detail::on_segment2d(p1, p2, p3)) return true;
  if (d4 == 0 && detail::on_segment2d(p1, p2, p4)) return true;
  return false;
}

// Minimum Euclidean distance between closed segments a1a2 and b1b2.
// Zero iff the segments intersect. Handles degenerate (point) segments
// and parallel pairs via the clamped closest-point recurrence.
inline double segment_min_distance(const Vec3& a1, const Vec3& a2, const Vec3& b1, const Vec3& b2) {
  const Vec3 d1 = a2 - a1;
  const Vec3 d2 = b2 - b1;
  const Vec3 r = a1 - b1;
  const double la = dot(d1, d1);
  const double lb = dot(d2, d2);
  const double f = dot(d2, r);

  constexpr double kEps = 1e-30;
  if (la <= kEps && lb <= kEps) return norm(r);
  double s = 0.0, t = 0.0;
  if (la <= kEps) {
    t = std::clamp(f / lb, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (lb <= kEps) {
      s = std::clamp(-c / la, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = la * lb - b * b;
      s = denom > kEps ? std::clamp((b * f - c * lb) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / lb;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / la, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / la, 0.0, 1.0);
      }
    }
  }
  const Vec3 pa = a1 + d1 * s;
  const Vec3 pb = b1 + d2 * t;
  return distance(pa, pb);
}

}  // namespace vesselforge
