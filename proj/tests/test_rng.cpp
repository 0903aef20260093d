#include <cmath>
#include <set>

#include "doctest.h"
#include "svlift/rng.hpp"

using namespace svlift::rng;

TEST_CASE("philox known answers") {
  // Random123 kat_vectors
  const auto zero = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(zero == Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto ones = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(ones == Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(pi == Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms stay inside (0, 1)") {
  CHECK(to_unit(0, 0) > 0.0);
  CHECK(to_unit(0xffffffffu, 0xffffffffu) < 1.0);
}

TEST_CASE("streams are deterministic and distinct") {
  const PathStream a(42, Stream::Paths, 3), b(42, Stream::Paths, 3);
  CHECK(a.normal_pair(10, 0) == b.normal_pair(10, 0));
  CHECK(a.normal_pair(10, 0) != PathStream(42, Stream::Paths, 4).normal_pair(10, 0));
  CHECK(a.normal_pair(10, 0) != PathStream(43, Stream::Paths, 3).normal_pair(10, 0));
  CHECK(a.normal_pair(10, 0) != PathStream(42, Stream::Restart, 3).normal_pair(10, 0));
  CHECK(a.normal_pair(10, 0) != a.normal_pair(11, 0));
  CHECK(a.normal_pair(10, 0) != a.normal_pair(10, 1));
}

TEST_CASE("normals have unit variance") {
  const PathStream s(2024, Stream::Paths, 0);
  double m1 = 0, m2 = 0, m4 = 0;
  const int n = 200000;
  double buf[2];
  for (int k = 0; k < n / 2; ++k) {
    s.normals(static_cast<std::uint64_t>(k), buf, 2);
    for (double z : buf) {
      m1 += z;
      m2 += z * z;
      m4 += z * z * z * z;
    }
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 5.0 / std::sqrt(n));
  CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("odd driver counts use one slot per normal") {
  const PathStream s(1, Stream::Paths, 0);
  double three[3], four[4];
  s.normals(5, three, 3);
  s.normals(5, four, 4);
  for (int j = 0; j < 3; ++j) CHECK(three[j] == four[j]);
}
