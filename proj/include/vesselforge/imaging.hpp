#pragma once

// Imaging simulation: Perlin background and vessel brightening, blob
// artifacts, separable PSF blur, shot and read noise, final compositing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "vesselforge/core.hpp"
#include "vesselforge/perlin.hpp"

namespace vesselforge {

struct BlobConfig {
  int max_count = 5;
  double max_size = 20.0;            // upper bound on the Gaussian size sigma_b
  int complexity_min = 1;            // lobes per blob
  int complexity_max = 4;
  double elongation_min = 1.0;       // principal-axis stretch
  double elongation_max = 3.0;
  double curvature_min = 0.0;        // arc bend of the lobe chain
  double curvature_max = 1.0;
  double intensity_min = 0.01;       // per-lobe peak intensity
  double intensity_max = 0.2;
};

struct ImagingConfig {
  int psf_size = 3;                  // odd kernel width, voxels
  double psf_sigma = 2.0;
  double noise_level = 800.0;        // Poisson photon scale; <= 0 disables shot noise
  double background_noise = 0.05;    // uniform additive baseline amplitude
  double gaussian_std = 0.005;       // read-noise std; 0 disables
  double background_brightness = 0.01;
  double perlin_scale = 20.0;
  double perlin_strength = 0.3;
  double perlin_darkness = 0.1;
  double brighten_scale = 50.0;
  double brighten_strength = 0.8;
  int octaves = 4;
  BlobConfig blob;
  double alpha = 1.0;                // contrast factor

  void validate() const {
    if (psf_size < 1 || psf_size % 2 == 0) throw std::invalid_argument("ImagingConfig: psf_size must be odd and >= 1");
    if (psf_sigma <= 0.0) throw std::invalid_argument("ImagingConfig: psf_sigma must be positive");
    if (octaves < 1) throw std::invalid_argument("ImagingConfig: octaves must be >= 1");
    if (blob.max_count < 0 || blob.complexity_min < 1 || blob.complexity_max < blob.complexity_min ||
        blob.elongation_max < blob.elongation_min || blob.curvature_max < blob.curvature_min ||
        blob.intensity_max < blob.intensity_min) {
      throw std::invalid_argument("ImagingConfig: malformed blob ranges");
    }
  }
};

// Normalized symmetric Gaussian weights, peak at the center tap.
inline std::vector<double> gaussian_kernel_1d(int size, double sigma) {
  if (size < 1 || size % 2 == 0) throw std::invalid_argument("gaussian_kernel_1d: size must be odd and >= 1");
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_kernel_1d: sigma must be positive");
  std::vector<double> w(size);
  const int c = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double x = i - c;
    w[i] = std::exp(-x * x / (2.0 * sigma * sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

namespace detail {

// Symmetric reflection: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace detail

// Three sequential 1D convolutions along x, y, z with mirror-reflect borders.
// Accumulation in double, storage in the volume's float.
inline ScalarVolume convolve_separable(const ScalarVolume& v, const std::vector<double>& kernel) {
  const int ks = static_cast<int>(kernel.size());
  if (ks % 2 == 0 || ks < 1) throw std::invalid_argument("convolve_separable: kernel size must be odd");
  const int c = ks / 2;
  ScalarVolume a = v;
  ScalarVolume b(v.dx, v.dy, v.dz, 0.0f);

  for (int z = 0; z < v.dz; ++z)
    for (int y = 0; y < v.dy; ++y)
      for (int x = 0; x < v.dx; ++x) {
        double acc = 0.0;
        for (int j = 0; j < ks; ++j) acc += kernel[j] * a.at(detail::reflect_index(x + j - c, v.dx), y, z);
        b.at(x, y, z) = static_cast<float>(acc);
      }
  std::swap(a, b);
  for (int z = 0; z < v.dz; ++z)
    for (int y = 0; y < v.dy; ++y)
      for (int x = 0; x < v.dx; ++x) {
        double acc = 0.0;
        for (int j = 0; j < ks; ++j) acc += kernel[j] * a.at(x, detail::reflect_index(y + j - c, v.dy), z);
        b.at(x, y, z) = static_cast<float>(acc);
      }
  std::swap(a, b);
  for (int z = 0; z < v.dz; ++z)
    for (int y = 0; y < v.dy; ++y)
      for (int x = 0; x < v.dx; ++x) {
        double acc = 0.0;
        for (int j = 0; j < ks; ++j) acc += kernel[j] * a.at(x, y, detail::reflect_index(z + j - c, v.dz));
        b.at(x, y, z) = static_cast<float>(acc);
      }
  return b;
}

// One tissue blob: `complexity` Gaussian lobes chained along a principal
// axis u, bent along w by `curvature`, each lobe stretched by `elongation`
// along the local axis. Peak value of each lobe is `intensity`.
inline void add_blob(ScalarVolume& v, const Vec3& center, double sigma_b, int complexity,
                     double elongation, double curvature, double intensity,
                     const Vec3& axis_u, const Vec3& bend_w) {
  const double sig_axis = elongation * sigma_b;
  const double sig_perp = sigma_b;
  for (int lobe = 0; lobe < complexity; ++lobe) {
    const double s = (lobe - 0.5 * (complexity - 1)) * sigma_b;
    const double bend = complexity > 1 ? curvature * s * s / (2.0 * sigma_b * (complexity - 1)) : 0.0;
    const Vec3 lc = center + axis_u * s + bend_w * bend;
    const double reach = 4.0 * std::max(sig_axis, sig_perp);
    const int x0 = std::max(0, static_cast<int>(std::floor(lc.x - reach - 0.5)));
    const int x1 = std::min(v.dx - 1, static_cast<int>(std::ceil(lc.x + reach - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(lc.y - reach - 0.5)));
    const int y1 = std::min(v.dy - 1, static_cast<int>(std::ceil(lc.y + reach - 0.5)));
    const int z0 = std::max(0, static_cast<int>(std::floor(lc.z - reach - 0.5)));
    const int z1 = std::min(v.dz - 1, static_cast<int>(std::ceil(lc.z + reach - 0.5)));
    for (int z = z0; z <= z1; ++z)
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
          const Vec3 d{(x + 0.5) - lc.x, (y + 0.5) - lc.y, (z + 0.5) - lc.z};
          const double along = dot(d, axis_u);
          const double perp_sq = std::max(0.0, dot(d, d) - along * along);
          const double e = along * along / (2.0 * sig_axis * sig_axis) + perp_sq / (2.0 * sig_perp * sig_perp);
          v.at(x, y, z) += static_cast<float>(intensity * std::exp(-e));
        }
  }
}

// Adds a uniformly drawn number of blobs (0..max_count) with parameters from
// the configured ranges; output stays non-negative.
inline void add_blobs(ScalarVolume& v, const BlobConfig& cfg, RandomStream& rng) {
  const int count = cfg.max_count > 0 ? static_cast<int>(rng.uniform_int(0, cfg.max_count)) : 0;
  for (int i = 0; i < count; ++i) {
    const Vec3 center{rng.uniform(0.0, v.dx), rng.uniform(0.0, v.dy), rng.uniform(0.0, v.dz)};
    const double sigma_b = rng.uniform(std::min(1.0, cfg.max_size), cfg.max_size);
    const int complexity = static_cast<int>(rng.uniform_int(cfg.complexity_min, cfg.complexity_max));
    const double elongation = rng.uniform(cfg.elongation_min, cfg.elongation_max);
    const double curvature = rng.uniform(cfg.curvature_min, cfg.curvature_max);
    const double intensity = rng.uniform(cfg.intensity_min, cfg.intensity_max);
    const Vec3 axis = rng.unit_vec3();
    Vec3 bend{0.0, 0.0, 1.0};
    for (int attempt = 0; attempt < 16; ++attempt) {
      const Vec3 cand = rng.unit_vec3();
      const Vec3 ortho = cand - axis * dot(cand, axis);
      if (dot(ortho, ortho) > 1e-12) {
        bend = normalized(ortho);
        break;
      }
    }
    add_blob(v, center, sigma_b, complexity, elongation, curvature, intensity, axis, bend);
  }
  for (float& x : v.data) x = std::max(0.0f, x);
}

// Photon-counting noise: each voxel becomes Poisson(I * level) / level.
// Draws come from a per-voxel forked stream, so the result does not depend
// on traversal or thread order.
inline ScalarVolume shot_noise(const ScalarVolume& v, double level, const RandomStream& rng) {
  if (level <= 0.0) throw std::invalid_argument("shot_noise: level must be positive");
  ScalarVolume out = v;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double lam = static_cast<double>(v.data[i]) * level;
    if (lam <= 0.0) {
      out.data[i] = 0.0f;
      continue;
    }
    RandomStream s = rng.fork(i);
    out.data[i] = static_cast<float>(static_cast<double>(s.poisson(lam)) / level);
  }
  return out;
}

// Additive zero-mean Gaussian read noise, one per-voxel stream each.
inline ScalarVolume read_noise(const ScalarVolume& v, double std_dev, const RandomStream& rng) {
  if (std_dev < 0.0) throw std::invalid_argument("read_noise: std must be >= 0");
  ScalarVolume out = v;
  if (std_dev == 0.0) return out;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    RandomStream s = rng.fork(i);
    out.data[i] = static_cast<float>(static_cast<double>(v.data[i]) + std_dev * s.normal());
  }
  return out;
}

// Full imaging pipeline over a binary mask:
//   1. vessel field   = mask * (1 + brighten_strength * fractal(p / brighten_scale)), clamped >= 0
//   2. background     = max(0, brightness + strength * (fractal(p / perlin_scale) - darkness))
//                       + U(0, background_noise) per voxel, zeroed under the mask
//   3. blobs added to the background
//   4. vessel field blurred with the separable Gaussian PSF
//   5. combined as alpha * (vessel + background)
//   6. shot noise then read noise (each skipped when its parameter is zero)
//   7. clamp to [0, 1]
inline ScalarVolume compose_image(const ScalarVolume& mask, const ImagingConfig& cfg, const RandomStream& rng) {
  cfg.validate();
  const std::uint64_t bg_seed = [&] { RandomStream s = rng.fork(0); return s.next_u64(); }();
  const std::uint64_t br_seed = [&] { RandomStream s = rng.fork(1); return s.next_u64(); }();
  const RandomStream bg_noise_stream = rng.fork(2);
  RandomStream blob_stream = rng.fork(3);
  const RandomStream shot_stream = rng.fork(4);
  const RandomStream read_stream = rng.fork(5);

  ScalarVolume vessel(mask.dx, mask.dy, mask.dz, 0.0f);
  ScalarVolume background(mask.dx, mask.dy, mask.dz, 0.0f);
  std::size_t idx = 0;
  for (int z = 0; z < mask.dz; ++z) {
    for (int y = 0; y < mask.dy; ++y) {
      for (int x = 0; x < mask.dx; ++x, ++idx) {
        const Vec3 p{static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        const bool on_vessel = mask.data[idx] != 0.0f;
        if (on_vessel) {
          const double bright = 1.0 + cfg.brighten_strength *
                                          fractal_perlin(p / cfg.brighten_scale, cfg.octaves, br_seed);
          vessel.data[idx] = static_cast<float>(std::max(0.0, bright));
        } else {
          double b = cfg.background_brightness +
                     cfg.perlin_strength * (fractal_perlin(p / cfg.perlin_scale, cfg.octaves, bg_seed) -
                                            cfg.perlin_darkness);
          b = std::max(0.0, b);
          if (cfg.background_noise > 0.0) {
            RandomStream s = bg_noise_stream.fork(idx);
            b += s.uniform(0.0, cfg.background_noise);
          }
          background.data[idx] = static_cast<float>(b);
        }
      }
    }
  }

  add_blobs(background, cfg.blob, blob_stream);

  const ScalarVolume blurred = convolve_separable(vessel, gaussian_kernel_1d(cfg.psf_size, cfg.psf_sigma));

  ScalarVolume img(mask.dx, mask.dy, mask.dz, 0.0f);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    img.data[i] = static_cast<float>(cfg.alpha * (static_cast<double>(blurred.data[i]) +
                                                  static_cast<double>(background.data[i])));
  }
  if (cfg.noise_level > 0.0) img = shot_noise(img, cfg.noise_level, shot_stream);
  if (cfg.gaussian_std > 0.0) img = read_noise(img, cfg.gaussian_std, read_stream);
  for (float& x : img.data) x = std::clamp(x, 0.0f, 1.0f);
  return img;
}

}  // namespace vesselforge
