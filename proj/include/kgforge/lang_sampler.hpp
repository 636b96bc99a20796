#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "kgforge/error.hpp"
#include "kgforge/rng.hpp"

namespace kgforge {

class SamplerError : public Error {
 public:
  enum class Kind { AllZeroCounts, AlphaOutOfRange, NegativeCount, MalformedRow };
  SamplerError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr double kDefaultAlpha = 0.5;

struct LanguageWeights {
  std::map<std::string, double> counts;
  double alpha = kDefaultAlpha;
  std::map<std::string, double> probs;
};

// probs[l] = q_l^alpha / sum_k q_k^alpha with q_l = counts[l] / sum(counts).
// Languages with zero count get probability zero for every alpha.
LanguageWeights smoothed_distribution(const std::map<std::string, double>& counts, double alpha);

// Inverse CDF over languages in lexicographic order for a draw u in [0, 1).
std::string sample_language(const LanguageWeights& weights, double u);
std::string sample_language(const LanguageWeights& weights, RandomSource& rng);

// `lang<TAB>count` rows.
std::map<std::string, double> read_language_counts(std::istream& in);

}  // namespace kgforge
