#pragma once

// Philox4x32-10 (Salmon et al. 2011).  Each normal draw is addressed by
// (seed, stream, path, step, slot), so results never depend on thread count
// or scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace svlift::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter ctr, Key key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

// Independent purposes get disjoint counter ranges.
enum class Stream : std::uint32_t { Paths = 0, SnapshotTimes = 1, Restart = 2 };

// Uniform on the open interval (0, 1).
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 20) | (lo >> 12);  // 52 bits
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

class PathStream {
 public:
  PathStream(std::uint64_t seed, Stream stream, std::uint64_t path)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_(static_cast<std::uint32_t>(path)),
        tag_(static_cast<std::uint32_t>(stream) << 24 | static_cast<std::uint32_t>(path >> 32) << 16) {}

  // Two standard normals per Philox block, drawn for (step, block).
  std::array<double, 2> normal_pair(std::uint64_t step, std::uint32_t block) const {
    const auto r = philox4x32_10({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                                  path_, tag_ | block},
                                 key_);
    const double u1 = to_unit(r[0], r[1]);
    const double u2 = to_unit(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  // Fills out[0..n) with standard normals for this step.
  void normals(std::uint64_t step, double* out, std::size_t n) const {
    for (std::size_t j = 0; j < n; j += 2) {
      const auto z = normal_pair(step, static_cast<std::uint32_t>(j / 2));
      out[j] = z[0];
      if (j + 1 < n) out[j + 1] = z[1];
    }
  }

  double uniform(std::uint64_t step) const {
    const auto r = philox4x32_10({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                                  path_, tag_},
                                 key_);
    return to_unit(r[0], r[1]);
  }

 private:
  Key key_;
  std::uint32_t path_;
  std::uint32_t tag_;
};

}  // namespace svlift::rng
