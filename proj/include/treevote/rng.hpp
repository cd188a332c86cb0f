#pragma once

#include <cstdint>

namespace treevote {

/// splitmix64 generator. The whole state is one 64-bit word, so a seed fully
/// determines the output sequence on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Uniform integer in [a, b] by modulo reduction. Throws InvalidArgument when a > b.
std::int64_t random_integer(SeededRng& rng, std::int64_t a, std::int64_t b);

/// Independent stream for member `index` of a collection seeded from `master`:
/// the seed is the first splitmix64 output of a generator started at
/// master.state() + index. The master is not advanced.
SeededRng derive_rng(const SeededRng& master, std::uint64_t index) noexcept;

}  // namespace treevote
