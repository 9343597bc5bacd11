#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "vesselforge/core.hpp"
#include "vesselforge/perlin.hpp"

using namespace vesselforge;

TEST_CASE("perlin is zero at integer lattice points") {
  REQUIRE(perlin3({3, 4, 5}, 0) == 0.0);
  RandomStream rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p{std::floor(rng.uniform(-50, 50)), std::floor(rng.uniform(-50, 50)),
                 std::floor(rng.uniform(-50, 50))};
    REQUIRE(perlin3(p, rng.next_u64()) == 0.0);
  }
}

TEST_CASE("perlin is deterministic in point and seed") {
  RandomStream rng(2);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const std::uint64_t seed = rng.next_u64();
    REQUIRE(perlin3(p, seed) == perlin3(p, seed));
  }
}

TEST_CASE("perlin stays within [-1, 1]") {
  RandomStream rng(3);
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-30, 30)};
    const double v = perlin3(p, 99);
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
  }
}

TEST_CASE("different seeds give different fields") {
  RandomStream rng(4);
  int differing = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    differing += perlin3(p, 1) != perlin3(p, 2);
  }
  REQUIRE(differing > 90);
}

TEST_CASE("finite-difference Lipschitz scan") {
  // Gradient-lattice noise with quintic fade has a modest gradient bound;
  // the scan freezes an empirical constant with margin.
  RandomStream rng(5);
  const double delta = 1e-4;
  double worst = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Vec3 q{p.x + rng.uniform(-delta, delta), p.y + rng.uniform(-delta, delta),
                 p.z + rng.uniform(-delta, delta)};
    const double step = distance(p, q);
    if (step == 0.0) continue;
    worst = std::max(worst, std::fabs(perlin3(p, 7) - perlin3(q, 7)) / step);
  }
  REQUIRE(worst <= 8.0);
}

TEST_CASE("fractal octave structure") {
  RandomStream rng(6);
  SECTION("one octave halves the doubled-frequency noise") {
    for (int i = 0; i < 100; ++i) {
      const Vec3 p{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
      REQUIRE(fractal_perlin(p, 1, 11) == Catch::Approx(0.5 * perlin3(p * 2.0, 11)).margin(1e-15));
    }
  }
  SECTION("two octaves compose from measured octave values") {
    for (int i = 0; i < 100; ++i) {
      const Vec3 p{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
      const double a = perlin3(p * 2.0, 13);
      const double b = perlin3(p * 4.0, 13);
      REQUIRE(fractal_perlin(p, 2, 13) == Catch::Approx(0.5 * a + 0.25 * b).margin(1e-15));
    }
  }
  SECTION("amplitude bound: |sum| < 1") {
    for (int i = 0; i < 2000; ++i) {
      const Vec3 p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)};
      REQUIRE(std::fabs(fractal_perlin(p, 6, 17)) < 1.0);
    }
  }
  SECTION("octave count must be positive") {
    REQUIRE_THROWS_AS(fractal_perlin({0, 0, 0}, 0, 1), std::invalid_argument);
  }
}
