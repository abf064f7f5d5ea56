#pragma once

#include <array>
#include <cstdint>

namespace fracspde::rng {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finaliser, used to derive child seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replica `index` under a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Standard normal stream keyed by (seed, stream, substream). The draw index
/// is the low 64 bits of the counter, so the i-th draw depends only on the
/// key and i, never on what other streams have produced.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream),
        substream_(substream) {}

  double next();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
  std::uint32_t substream_;
  std::uint64_t block_ = 0;
  std::array<double, 2> cache_{};
  int cached_ = 0;
};

}  // namespace fracspde::rng
