#include "kgforge/rng.hpp"

#include <limits>
#include <stdexcept>

namespace kgforge {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kPrime;
  }
  return state;
}

std::uint64_t record_seed(std::uint64_t global_seed, std::string_view record_id) {
  char le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<char>((global_seed >> (8 * i)) & 0xff);
  return fnv1a64(record_id, fnv1a64(std::string_view(le, 8)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below requires n > 0");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace kgforge
