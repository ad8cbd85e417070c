#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so every sampled unit gets its own stream.

#include <array>
#include <cstdint>

namespace flowsparse {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(Key key) : key_(key) {}
  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  [[nodiscard]] Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k[0] += 0x9E3779B9U;
        k[1] += 0xBB67AE85U;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53U} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57U} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  /// Uniform double in [0, 1) for stream `stream`, draw number `index`.
  [[nodiscard]] double uniform(std::uint64_t stream, std::uint32_t index = 0) const {
    auto out = (*this)({static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), index, 0});
    const std::uint64_t bits = (std::uint64_t{out[0] >> 5} << 26) | (out[1] >> 6);
    return static_cast<double>(bits) * 0x1.0p-53;
  }

 private:
  Key key_;
};

}  // namespace flowsparse
