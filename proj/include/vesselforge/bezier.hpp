#pragma once

// Cubic Bézier center-lines for vessel segments.

#include <cmath>
#include <utility>

#include "vesselforge/core.hpp"

namespace vesselforge {

struct BezierSegment {
  Vec3 p0, p1, p2, p3;
};

// Bernstein evaluation of the curve point at parameter t in [0, 1].
inline Vec3 bezier_point(const BezierSegment& seg, double t) {
  const double s = 1.0 - t;
  const double b0 = s * s * s;
  const double b1 = 3.0 * s * s * t;
  const double b2 = 3.0 * s * t * t;
  const double b3 = t * t * t;
  return seg.p0 * b0 + seg.p1 * b1 + seg.p2 * b2 + seg.p3 * b3;
}

// Intermediate control points at one-third and two-thirds along the chord,
// displaced by opposite perpendicular offsets of magnitude w. The
// perpendicular direction is isotropic in 3D: a random unit vector is
// orthogonalized against the chord.
inline std::pair<Vec3, Vec3> control_points(const Vec3& p0, const Vec3& p3, double w, RandomStream& rng) {
  const Vec3 d = p3 - p0;
  Vec3 n{0.0, 0.0, 0.0};
  const Vec3 axis = normalized(d);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Vec3 v = rng.unit_vec3();
    const Vec3 ortho = v - axis * dot(v, axis);
    if (dot(ortho, ortho) > 1e-12) {
      n = normalized(ortho);
      break;
    }
  }
  const Vec3 p1 = p0 + d * (1.0 / 3.0) + n * w;
  const Vec3 p2 = p0 + d * (2.0 / 3.0) - n * w;
  return {p1, p2};
}

}  // namespace vesselforge
