#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace sono {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
///
/// The 64-bit seed becomes the key; the 64-bit stream id occupies the upper
/// half of the 128-bit counter and the lower half counts blocks. All derived
/// draws (uniform doubles, normals, bounded integers) use fixed bit recipes so
/// sequences are identical on every platform.
class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  /// The raw bijection: ten rounds over one counter block.
  static Block generate(Block counter, Key key) noexcept;

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1).
  double uniform_open() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  /// Uniform on {0, ..., n-1}, unbiased by rejection. n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  void refill() noexcept;

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  std::size_t used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sono
