#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "vesselforge/core.hpp"

using namespace vesselforge;

// Reference draws for philox4x64-10 with key = (seed, mix64(seed)) and a
// pre-incremented little-endian 256-bit counter, frozen from an independent
// implementation of the same named algorithm.
TEST_CASE("random stream matches frozen philox4x64-10 vectors") {
  struct Vector {
    std::uint64_t seed;
    std::array<std::uint64_t, 8> draws;
  };
  const std::vector<Vector> vectors = {
      {0x0ull,
       {0x5e24d78f93e715dcull, 0xbd0667344c5ceb39ull, 0x6b06b414d5866bd3ull, 0xc516aeed24e33b2eull,
        0x153811204775632cull, 0x4b40d613a0c1492dull, 0x3e1a03454e160e56ull, 0x68d7219115e422d4ull}},
      {0x2aull,
       {0x286acddfd6cfca26ull, 0xe472d9631930e22aull, 0xf88c6e431b7d28c8ull, 0x89e176295fbb8381ull,
        0x2d746f08e65a575aull, 0x07b1893351fca0c5ull, 0xec1ceda3113de24dull, 0xd4b7133041824fa7ull}},
      {0xdeadbeefull,
       {0x2e6a91b9a2030077ull, 0x85b4b5960113ecf2ull, 0x8048881c84d0b0cbull, 0x0ed00003081eb98bull,
        0x95b293598d4c34a4ull, 0x2a264a66352cee31ull, 0xd595b0fbbd55519bull, 0x35fc02c2e4834e99ull}}};
  for (const auto& v : vectors) {
    RandomStream s(v.seed);
    for (const std::uint64_t expected : v.draws) {
      REQUIRE(s.next_u64() == expected);
    }
  }
}

TEST_CASE("fork determinism and distinctness") {
  RandomStream parent(42);

  SECTION("same index twice gives identical streams") {
    RandomStream a = parent.fork(0);
    RandomStream b = parent.fork(0);
    for (int i = 0; i < 64; ++i) REQUIRE(a.next_u64() == b.next_u64());
  }

  SECTION("distinct indices differ within the first 64 draws") {
    RandomStream a = parent.fork(0);
    RandomStream b = parent.fork(1);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) any_diff |= (a.next_u64() != b.next_u64());
    REQUIRE(any_diff);
  }

  SECTION("nested forks are stable, frozen against the reference") {
    RandomStream s = RandomStream(42).fork(1).fork(2);
    const std::array<std::uint64_t, 4> expected = {0x26c0fe26d30b0d66ull, 0xa382029e3d67ef53ull,
                                                   0x04317ba4dcd6421dull, 0xcf846500f85f7d43ull};
    for (const std::uint64_t e : expected) REQUIRE(s.next_u64() == e);
  }

  SECTION("fork(42,0) and fork(42,1) match the reference draws") {
    RandomStream a = RandomStream(42).fork(0);
    REQUIRE(a.next_u64() == 0x8ad7e95e01d24c48ull);
    REQUIRE(a.next_u64() == 0x09daae9cda5fe811ull);
    RandomStream b = RandomStream(42).fork(1);
    REQUIRE(b.next_u64() == 0xa71798392072d632ull);
    REQUIRE(b.next_u64() == 0x0509caf66ad314f9ull);
  }
}

TEST_CASE("sibling forks do not perturb each other") {
  // Draws from one child must not depend on how many siblings were forked.
  RandomStream parent(9001);
  RandomStream lone = parent.fork(7);
  std::vector<std::uint64_t> expected;
  for (int i = 0; i < 16; ++i) expected.push_back(lone.next_u64());

  RandomStream parent2(9001);
  for (int i = 0; i < 100; ++i) (void)parent2.fork(i);
  RandomStream again = parent2.fork(7);
  for (int i = 0; i < 16; ++i) REQUIRE(again.next_u64() == expected[i]);
}

TEST_CASE("uniform01 is in [0,1) and reproducible") {
  RandomStream s(123);
  RandomStream t(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(u == t.uniform01());
  }
}

TEST_CASE("uniform_int covers its inclusive range") {
  RandomStream s(5);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = s.uniform_int(2, 7);
    REQUIRE(v >= 2);
    REQUIRE(v <= 7);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 6);
}

TEST_CASE("normal draws have the expected moments") {
  RandomStream s(77);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  REQUIRE(std::fabs(mean) < 0.01);
  REQUIRE(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("poisson moments across both sampling regimes") {
  for (const double lambda : {0.5, 4.0, 40.0, 400.0}) {
    RandomStream s(static_cast<std::uint64_t>(lambda * 1000));
    const int n = 100000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(s.poisson(lambda));
      sum += k;
      sum_sq += k * k;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    REQUIRE(std::fabs(mean - lambda) < 0.05 * lambda + 0.05);
    REQUIRE(std::fabs(var - lambda) < 0.08 * lambda + 0.1);
  }
}

TEST_CASE("poisson of zero is exactly zero") {
  RandomStream s(1);
  for (int i = 0; i < 100; ++i) REQUIRE(s.poisson(0.0) == 0);
}

TEST_CASE("unit_vec3 has unit norm") {
  RandomStream s(3);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(std::fabs(norm(s.unit_vec3()) - 1.0) < 1e-12);
  }
}

TEST_CASE("scalar volume layout is x-fastest z-slowest") {
  ScalarVolume v(3, 4, 5);
  REQUIRE(v.size() == 60);
  REQUIRE(v.index(1, 0, 0) == 1);
  REQUIRE(v.index(0, 1, 0) == 3);
  REQUIRE(v.index(0, 0, 1) == 12);
  v.at(2, 3, 4) = 1.5f;
  REQUIRE(v.data[59] == 1.5f);
}

TEST_CASE("fnv1a64 matches its reference constants") {
  // Standard FNV-1a test values.
  REQUIRE(fnv1a64("", 0) == 0xcbf29ce484222325ull);
  REQUIRE(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cull);
}
