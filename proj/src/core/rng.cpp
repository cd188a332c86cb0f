#include "treevote/rng.hpp"

#include <string>

#include "treevote/errors.hpp"

namespace treevote {

std::int64_t random_integer(SeededRng& rng, std::int64_t a, std::int64_t b) {
  if (a > b) {
    fail(ErrorCode::InvalidArgument,
         "random_integer: empty range [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const std::uint64_t span = static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a) + 1;
  const std::uint64_t draw = rng.next();
  // span wraps to 0 only for the full 64-bit range.
  const std::uint64_t offset = span == 0 ? draw : draw % span;
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + offset);
}

SeededRng derive_rng(const SeededRng& master, std::uint64_t index) noexcept {
  SeededRng mixer(master.state() + index);
  return SeededRng(mixer.next());
}

}  // namespace treevote
