#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace kgforge {

// FNV-1a 64 over (global_seed as 8 little-endian bytes ++ record_id bytes).
// Every record-randomized stage seeds its generator with this value so a
// record's random outcomes depend only on the global seed and its own id.
std::uint64_t record_seed(std::uint64_t global_seed, std::string_view record_id);

std::uint64_t fnv1a64(std::string_view bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL);

// Source of uniform draws. Virtual so tests can script exact draw sequences.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  // Uniform in [0, 1).
  virtual double uniform() = 0;
  // Uniform integer in [0, n); n > 0.
  virtual std::uint64_t below(std::uint64_t n) = 0;
};

// mt19937_64 with portable conversions (the standard distributions are
// implementation-defined, which would break cross-platform reproducibility).
class Rng final : public RandomSource {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() override;
  std::uint64_t below(std::uint64_t n) override;

 private:
  std::mt19937_64 engine_;
};

}  // namespace kgforge
