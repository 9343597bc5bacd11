#pragma once

// Shared primitives: 3D vectors, the dense volume container, and the
// deterministic splittable random stream used by every pipeline stage.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesselforge {

inline constexpr const char* kGeneratorVersion = "1.0.0";
inline constexpr const char* kRngAlgorithm = "philox4x64-10";
inline constexpr const char* kChecksumAlgorithm = "fnv1a-64";

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec3{0.0, 0.0, 0.0};
}

// Dense 3D scalar field. Layout is fixed: x fastest, z slowest, so the
// serialized byte order of volume.raw is unambiguous.
struct ScalarVolume {
  int dx = 0, dy = 0, dz = 0;
  std::vector<float> data;

  ScalarVolume() = default;
  ScalarVolume(int x, int y, int z, float fill = 0.0f)
      : dx(x), dy(y), dz(z), data(static_cast<std::size_t>(x) * y * z, fill) {
    if (x <= 0 || y <= 0 || z <= 0) throw std::invalid_argument("ScalarVolume: dims must be positive");
  }

  std::size_t size() const { return data.size(); }
  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(dx) * (static_cast<std::size_t>(y) + static_cast<std::size_t>(dy) * z);
  }
  float at(int x, int y, int z) const { return data[index(x, y, z)]; }
  float& at(int x, int y, int z) { return data[index(x, y, z)]; }
  bool same_dims(const ScalarVolume& o) const { return dx == o.dx && dy == o.dy && dz == o.dz; }
};

namespace detail {

// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Philox4x64 {
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  // 10-round block function.
  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                            std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, ctr[0], hi0, lo0);
      mulhilo(kMul1, ctr[2], hi1, lo1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

}  // namespace detail

// Deterministic splittable random stream (counter-based philox4x64-10).
// Identical seed and draw sequence give identical outputs on every run and
// platform; fork(i) derives an independent child stream as a pure function
// of (seed, i), so sibling streams never interfere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0)
      : seed_(seed), key_{seed, detail::mix64(seed)} {}

  std::uint64_t seed() const { return seed_; }

  RandomStream fork(std::uint64_t index) const {
    // Injective in index: mix64 is bijective and the inner multiplier is odd.
    const std::uint64_t child =
        detail::mix64(seed_ ^ detail::mix64(0x9E6C63D0876A9F4Bull + index * 0xD1B54A32D192ED03ull));
    return RandomStream(child);
  }

  std::uint64_t next_u64() {
    if (buf_pos_ == 4) refill();
    return buf_[buf_pos_++];
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller; two uniforms per variate, no cached state.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Poisson: product-of-uniforms inversion below lambda = 10, transformed
  // rejection (PTRD) above.
  std::int64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) return poisson_inversion(lambda);
    return poisson_ptrd(lambda);
  }

  // Uniform direction on the unit sphere.
  Vec3 unit_vec3() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * 3.14159265358979323846);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

 private:
  void refill() {
    // Counter advances before each block, matching the reference stream.
    increment_counter();
    buf_ = detail::Philox4x64::block(ctr_, key_);
    buf_pos_ = 0;
  }

  void increment_counter() {
    for (int i = 0; i < 4; ++i) {
      if (++ctr_[i] != 0) break;
    }
  }

  std::int64_t poisson_inversion(double lambda) {
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double prod = 1.0;
    do {
      ++k;
      prod *= uniform01();
    } while (prod > limit);
    return k - 1;
  }

  std::int64_t poisson_ptrd(double lambda) {
    const double smu = std::sqrt(lambda);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform01() - 0.5;
      const double v = uniform01();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * std::log(lambda) - lambda - std::lgamma(kf + 1.0)) {
        return static_cast<std::int64_t>(kf);
      }
    }
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;
};

// 64-bit FNV-1a over a byte range; used for volume checksums.
inline std::uint64_t fnv1a64(const void* bytes, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

static_assert(std::endian::native == std::endian::little,
              "volume.raw serialization assumes a little-endian host");

}  // namespace vesselforge
