#pragma once

// Generation recipes: the homogeneous preset with its fixed parameter table,
// and uniform sampling over the varied parameter ranges.

#include <algorithm>
#include <array>
#include <cmath>

#include "vesselforge/core.hpp"
#include "vesselforge/graph.hpp"
#include "vesselforge/imaging.hpp"
#include "vesselforge/mask.hpp"

namespace vesselforge {

struct GenConfig {
  GraphConfig graph;
  MaskConfig mask;
  ImagingConfig imaging;
  std::array<int, 3> dims{64, 64, 64};

  void validate() const {
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) throw std::invalid_argument("GenConfig: dims must be positive");
    graph.validate();
    mask.validate();
    imaging.validate();
  }
};

inline GenConfig homogeneous_config() {
  GenConfig cfg;
  cfg.dims = {64, 64, 64};

  cfg.graph.n_max = 32;
  cfg.graph.e_max = 0;  // uncapped
  cfg.graph.d_min = 5.0;
  cfg.graph.d_max = 30.0;
  cfg.graph.w_min = 3.0;
  cfg.graph.w_max = 10.0;
  cfg.graph.bounds = {64.0, 64.0, 64.0};
  cfg.graph.cone_half_angle_deg = 60.0;

  cfg.mask.straight_lines = false;
  cfg.mask.invert = false;
  cfg.mask.samples_per_unit_length = 2.0;
  cfg.mask.jitter_amplitude = 0.1;

  cfg.imaging.psf_size = 3;
  cfg.imaging.psf_sigma = 2.0;
  cfg.imaging.noise_level = 800.0;
  cfg.imaging.background_noise = 0.05;
  cfg.imaging.gaussian_std = 0.005;
  cfg.imaging.background_brightness = 0.01;
  cfg.imaging.perlin_scale = 20.0;
  cfg.imaging.perlin_strength = 0.3;
  cfg.imaging.perlin_darkness = 0.1;
  cfg.imaging.brighten_scale = 50.0;
  cfg.imaging.brighten_strength = 0.8;
  cfg.imaging.octaves = 4;
  cfg.imaging.alpha = 1.0;

  cfg.imaging.blob.max_count = 5;
  cfg.imaging.blob.max_size = 20.0;
  cfg.imaging.blob.complexity_min = 1;
  cfg.imaging.blob.complexity_max = 4;
  cfg.imaging.blob.elongation_min = 1.0;
  cfg.imaging.blob.elongation_max = 3.0;
  cfg.imaging.blob.curvature_min = 0.0;
  cfg.imaging.blob.curvature_max = 1.0;
  cfg.imaging.blob.intensity_min = 0.01;
  cfg.imaging.blob.intensity_max = 0.2;
  return cfg;
}

// Draws one varied-recipe configuration. Every listed parameter is uniform
// over its range; everything else keeps the homogeneous value.
inline GenConfig sample_varied_config(RandomStream& rng) {
  GenConfig cfg = homogeneous_config();

  cfg.graph.d_min = rng.uniform(3.0, 10.0);
  cfg.graph.d_max = rng.uniform(cfg.graph.d_min + 5.0, std::min(64.0, cfg.graph.d_min + 25.0));
  cfg.graph.w_min = rng.uniform(2.0, 8.0);
  cfg.graph.w_max = rng.uniform(cfg.graph.w_min + 2.0, std::min(24.0, cfg.graph.w_min + 16.0));

  cfg.mask.straight_lines = rng.bernoulli(0.10);
  cfg.mask.invert = rng.bernoulli(0.10);

  // Even PSF sizes round up to the next odd so the kernel stays centered.
  const int raw_size = static_cast<int>(rng.uniform_int(2, 7));
  cfg.imaging.psf_size = raw_size % 2 == 0 ? raw_size + 1 : raw_size;
  cfg.imaging.psf_sigma = rng.uniform(0.5, 5.0);
  cfg.imaging.noise_level = rng.uniform(200.0, 2000.0);
  cfg.imaging.perlin_scale = rng.uniform(10.0, 100.0);
  cfg.imaging.perlin_strength = rng.uniform(0.1, 0.8);
  cfg.imaging.perlin_darkness = rng.uniform(0.05, 0.3);
  cfg.imaging.brighten_scale = rng.uniform(20.0, 100.0);
  cfg.imaging.brighten_strength = rng.uniform(0.3, 1.2);
  cfg.imaging.blob.max_count = static_cast<int>(rng.uniform_int(2, 15));
  cfg.imaging.blob.max_size = rng.uniform(10.0, 40.0);
  cfg.imaging.blob.intensity_max = rng.uniform(0.01, 0.4);
  cfg.imaging.blob.intensity_min = std::min(0.01, cfg.imaging.blob.intensity_max);
  return cfg;
}

}  // namespace vesselforge
