#pragma once

// Maximum-intensity projection of a volume to a 2D image and 8-bit binary
// PGM output for quick visual checks.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vesselforge/core.hpp"
#include "vesselforge/sample.hpp"

namespace vesselforge {

enum class Axis { X, Y, Z };

inline Axis axis_from_string(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  throw std::invalid_argument("axis must be one of x, y, z");
}

struct Image2D {
  int width = 0;
  int height = 0;
  std::vector<float> data;  // row-major, row = height index

  float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Per-pixel maximum along the chosen axis. Projecting along z keeps (x, y);
// along y keeps (x, z); along x keeps (y, z).
inline Image2D max_intensity_projection(const ScalarVolume& v, Axis axis) {
  Image2D img;
  switch (axis) {
    case Axis::Z:
      img.width = v.dx;
      img.height = v.dy;
      break;
    case Axis::Y:
      img.width = v.dx;
      img.height = v.dz;
      break;
    case Axis::X:
      img.width = v.dy;
      img.height = v.dz;
      break;
  }
  img.data.assign(static_cast<std::size_t>(img.width) * img.height, 0.0f);
  for (int z = 0; z < v.dz; ++z) {
    for (int y = 0; y < v.dy; ++y) {
      for (int x = 0; x < v.dx; ++x) {
        const float val = v.at(x, y, z);
        float* px = nullptr;
        switch (axis) {
          case Axis::Z: px = &img.at(x, y); break;
          case Axis::Y: px = &img.at(x, z); break;
          case Axis::X: px = &img.at(y, z); break;
        }
        *px = std::max(*px, val);
      }
    }
  }
  return img;
}

// Values in [0, 1] scale to 0..255 with round-half-up.
inline unsigned char to_gray8(float v) {
  const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return static_cast<unsigned char>(std::clamp(scaled, 0.0, 255.0));
}

inline void write_pgm(const Image2D& img, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> row(img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) row[x] = to_gray8(img.at(x, y));
    f.write(reinterpret_cast<const char*>(row.data()), img.width);
  }
  if (!f) throw IoError("short write on " + path.string());
}

}  // namespace vesselforge
