#pragma once

// Gradient-lattice (Perlin) noise with seed-hashed gradients, plus the
// fractal octave sum used for background and brightening textures.

#include <cmath>
#include <cstdint>

#include "vesselforge/core.hpp"

namespace vesselforge {

namespace detail {

// Hashed gradient at an integer lattice point; any (point, seed) pair maps
// to one of the 12 edge directions of a cube (16-entry table pads the
// selection to a power of two).
inline Vec3 lattice_gradient(std::int64_t ix, std::int64_t iy, std::int64_t iz, std::uint64_t seed) {
  static constexpr double kGrad[16][3] = {
      {1, 1, 0}, {-1, 1, 0}, {1, -1, 0}, {-1, -1, 0},
      {1, 0, 1}, {-1, 0, 1}, {1, 0, -1}, {-1, 0, -1},
      {0, 1, 1}, {0, -1, 1}, {0, 1, -1}, {0, -1, -1},
      {1, 1, 0}, {-1, 1, 0}, {0, -1, 1}, {0, -1, -1}};
  const std::uint64_t h = mix64(seed ^ (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull) ^
                                (static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4Full) ^
                                (static_cast<std::uint64_t>(iz) * 0x165667B19E3779F9ull));
  const double* g = kGrad[h & 15];
  return {g[0], g[1], g[2]};
}

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }
inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

}  // namespace detail

// Smooth gradient noise in [-1, 1]; exactly zero at integer lattice points
// and deterministic in (p, seed).
inline double perlin3(const Vec3& p, std::uint64_t seed) {
  const double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const auto iz = static_cast<std::int64_t>(fz);
  const double rx = p.x - fx, ry = p.y - fy, rz = p.z - fz;

  double corner[2][2][2];
  for (int cz = 0; cz <= 1; ++cz) {
    for (int cy = 0; cy <= 1; ++cy) {
      for (int cx = 0; cx <= 1; ++cx) {
        const Vec3 g = detail::lattice_gradient(ix + cx, iy + cy, iz + cz, seed);
        corner[cx][cy][cz] = g.x * (rx - cx) + g.y * (ry - cy) + g.z * (rz - cz);
      }
    }
  }
  const double u = detail::fade(rx), v = detail::fade(ry), w = detail::fade(rz);
  const double x00 = detail::lerp(corner[0][0][0], corner[1][0][0], u);
  const double x10 = detail::lerp(corner[0][1][0], corner[1][1][0], u);
  const double x01 = detail::lerp(corner[0][0][1], corner[1][0][1], u);
  const double x11 = detail::lerp(corner[0][1][1], corner[1][1][1], u);
  const double y0 = detail::lerp(x00, x10, v);
  const double y1 = detail::lerp(x01, x11, v);
  return detail::lerp(y0, y1, w);
}

// Octave sum: sum over i in [1, n] of 2^-i * noise(2^i * p).
inline double fractal_perlin(const Vec3& p, int octaves, std::uint64_t seed) {
  if (octaves < 1) throw std::invalid_argument("fractal_perlin: octaves must be >= 1");
  double value = 0.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  for (int i = 1; i <= octaves; ++i) {
    amplitude *= 0.5;
    frequency *= 2.0;
    value += amplitude * perlin3(p * frequency, seed);
  }
  return value;
}

}  // namespace vesselforge
