#include "kgforge/lang_sampler.hpp"

#include <cmath>
#include <istream>
#include <string>

namespace kgforge {

LanguageWeights smoothed_distribution(const std::map<std::string, double>& counts, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw SamplerError(SamplerError::Kind::AlphaOutOfRange, "alpha must lie in [0, 1]");
  double total = 0.0;
  for (const auto& [lang, c] : counts) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw SamplerError(SamplerError::Kind::NegativeCount, "bad count for " + lang);
    total += c;
  }
  if (total <= 0.0) throw SamplerError(SamplerError::Kind::AllZeroCounts, "all counts are zero");

  LanguageWeights w;
  w.counts = counts;
  w.alpha = alpha;
  double norm = 0.0;
  for (const auto& [lang, c] : counts) {
    // pow(0, 0) would be 1; absent languages must stay at zero.
    const double v = c > 0.0 ? std::exp(alpha * std::log(c / total)) : 0.0;
    w.probs[lang] = v;
    norm += v;
  }
  for (auto& [lang, p] : w.probs) p /= norm;
  return w;
}

std::string sample_language(const LanguageWeights& weights, double u) {
  double cumulative = 0.0;
  const std::string* last = nullptr;
  for (const auto& [lang, p] : weights.probs) {
    if (p <= 0.0) continue;
    cumulative += p;
    last = &lang;
    if (u < cumulative) return lang;
  }
  // Rounding can leave the final cumulative sum a hair below u.
  if (!last) throw SamplerError(SamplerError::Kind::AllZeroCounts, "no language to sample");
  return *last;
}

std::string sample_language(const LanguageWeights& weights, RandomSource& rng) {
  return sample_language(weights, rng.uniform());
}

std::map<std::string, double> read_language_counts(std::istream& in) {
  std::map<std::string, double> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos)
      throw SamplerError(SamplerError::Kind::MalformedRow,
                         "line " + std::to_string(line_no) + ": expected lang<TAB>count");
    std::size_t used = 0;
    double c = 0;
    try {
      c = std::stod(line.substr(tab + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != line.size() - tab - 1)
      throw SamplerError(SamplerError::Kind::MalformedRow,
                         "line " + std::to_string(line_no) + ": bad count");
    if (c < 0) throw SamplerError(SamplerError::Kind::NegativeCount, "negative count");
    counts[line.substr(0, tab)] += c;
  }
  return counts;
}

}  // namespace kgforge
