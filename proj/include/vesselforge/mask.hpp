#pragma once

// Rasterization of vessel graphs into binary volumetric masks: spheres with
// jittered radii placed densely along each edge's center-line.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vesselforge/bezier.hpp"
#include "vesselforge/core.hpp"
#include "vesselforge/graph.hpp"

namespace vesselforge {

struct MaskConfig {
  bool straight_lines = false;        // chords instead of curved center-lines
  bool invert = false;                // flip foreground/background
  double samples_per_unit_length = 2.0;  // sphere centers per voxel of arc length, >= 2
  double jitter_amplitude = 0.1;      // relative radius jitter bound, in [0, 1)

  void validate() const {
    if (samples_per_unit_length < 2.0) throw std::invalid_argument("MaskConfig: samples_per_unit_length must be >= 2");
    if (!(jitter_amplitude >= 0.0 && jitter_amplitude < 1.0)) throw std::invalid_argument("MaskConfig: jitter_amplitude must be in [0, 1)");
  }
};

// Sphere centers along the curve. Spacing between consecutive centers is at
// most min(1 / samples_per_unit_length, r_base / 2); the subdivision doubles
// until the polyline satisfies the bound, so both the rasterizer and any
// brute-force membership check see the same center set.
inline std::vector<Vec3> curve_sample_points(const BezierSegment& curve, double r_base, const MaskConfig& cfg) {
  const double target = std::min(1.0 / cfg.samples_per_unit_length, 0.5 * r_base);
  const double chord = distance(curve.p0, curve.p3);
  int n = std::max(16, static_cast<int>(std::ceil(chord / std::max(target, 1e-9))));
  for (;;) {
    std::vector<Vec3> pts;
    pts.reserve(n + 1);
    for (int i = 0; i <= n; ++i) pts.push_back(bezier_point(curve, static_cast<double>(i) / n));
    double max_step = 0.0;
    for (int i = 0; i < n; ++i) max_step = std::max(max_step, distance(pts[i], pts[i + 1]));
    if (max_step <= target || n >= (1 << 22)) return pts;
    n *= 2;
  }
}

// Marks every voxel whose center lies within radius r of c. Voxel (ix,iy,iz)
// has center (ix+0.5, iy+0.5, iz+0.5); membership is an exact squared-distance
// comparison so independent membership checks classify ties identically.
inline void rasterize_sphere(ScalarVolume& mask, const Vec3& c, double r) {
  if (r <= 0.0) return;
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - r - 0.5)));
  const int x1 = std::min(mask.dx - 1, static_cast<int>(std::ceil(c.x + r - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - r - 0.5)));
  const int y1 = std::min(mask.dy - 1, static_cast<int>(std::ceil(c.y + r - 0.5)));
  const int z0 = std::max(0, static_cast<int>(std::floor(c.z - r - 0.5)));
  const int z1 = std::min(mask.dz - 1, static_cast<int>(std::ceil(c.z + r - 0.5)));
  const double r_sq = r * r;
  for (int z = z0; z <= z1; ++z) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double ddx = (x + 0.5) - c.x;
        const double ddy = (y + 0.5) - c.y;
        const double ddz = (z + 0.5) - c.z;
        if (ddx * ddx + ddy * ddy + ddz * ddz <= r_sq) {
          mask.at(x, y, z) = 1.0f;
        }
      }
    }
  }
}

// Sweeps jittered spheres along the curve; voxels are only ever set, never
// cleared. One uniform jitter draw per sphere center.
inline void rasterize_edge(ScalarVolume& mask, const BezierSegment& curve, double r_base,
                           const MaskConfig& cfg, RandomStream& rng) {
  if (r_base <= 0.0) return;
  const auto centers = curve_sample_points(curve, r_base, cfg);
  for (const Vec3& c : centers) {
    const double eps = rng.uniform(-cfg.jitter_amplitude, cfg.jitter_amplitude);
    rasterize_sphere(mask, c, r_base * (1.0 + eps));
  }
}

// Center-line for an edge: a curved Bézier through randomized perpendicular
// control offsets, or the straight chord. Straight mode consumes no draws.
inline BezierSegment edge_center_line(const Vec3& p0, const Vec3& p3, double weight,
                                      const MaskConfig& cfg, RandomStream& rng) {
  if (cfg.straight_lines) {
    const Vec3 d = p3 - p0;
    return {p0, p0 + d * (1.0 / 3.0), p0 + d * (2.0 / 3.0), p3};
  }
  const auto [p1, p2] = control_points(p0, p3, weight, rng);
  return {p0, p1, p2, p3};
}

// Full graph-to-mask conversion. Each edge draws from its own forked stream,
// so edges may be rasterized in parallel with unchanged results; radius is
// weight / 2 (weights are diameters).
inline ScalarVolume build_mask(const VesselGraph& g, int dx, int dy, int dz,
                               const MaskConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  ScalarVolume mask(dx, dy, dz, 0.0f);
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const VesselEdge& e = g.edges[k];
    RandomStream edge_stream = rng.fork(k);
    const BezierSegment curve =
        edge_center_line(g.nodes[e.a].pos, g.nodes[e.b].pos, e.weight, cfg, edge_stream);
    rasterize_edge(mask, curve, 0.5 * e.weight, cfg, edge_stream);
  }
  if (cfg.invert) {
    for (float& v : mask.data) v = 1.0f - v;
  }
  return mask;
}

}  // namespace vesselforge
