#include "kgforge/scoring.hpp"

#include <cmath>

namespace kgforge {

double perplexity(std::span<const double> log_probs) {
  if (log_probs.empty()) throw ScoringError(ScoringError::Kind::EmptySequence, "empty sequence");
  double sum = 0.0;
  for (double v : log_probs) {
    if (!(v <= 0.0))
      throw ScoringError(ScoringError::Kind::PositiveLogProb,
                         "log-probability " + std::to_string(v) + " is not <= 0");
    sum += v;
  }
  return std::exp(-sum / static_cast<double>(log_probs.size()));
}

std::size_t rank_options(const std::vector<std::vector<double>>& options) {
  if (options.empty()) throw ScoringError(ScoringError::Kind::NoOptions, "no options to rank");
  std::size_t best = 0;
  double best_ppl = perplexity(options[0]);
  for (std::size_t i = 1; i < options.size(); ++i) {
    const double ppl = perplexity(options[i]);
    if (ppl < best_ppl) {
      best = i;
      best_ppl = ppl;
    }
  }
  return best;
}

void PrfCounts::add(const EvalPair& pair) {
  predicted += pair.predicted.size();
  gold += pair.gold.size();
  for (const auto& t : pair.predicted) true_positives += pair.gold.count(t);
}

void PrfCounts::merge(const PrfCounts& other) {
  true_positives += other.true_positives;
  predicted += other.predicted;
  gold += other.gold;
}

Prf prf_from_counts(const PrfCounts& c) {
  Prf out;
  if (c.predicted > 0) out.precision = static_cast<double>(c.true_positives) / static_cast<double>(c.predicted);
  if (c.gold > 0) out.recall = static_cast<double>(c.true_positives) / static_cast<double>(c.gold);
  if (out.precision + out.recall > 0.0)
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

Prf triple_prf(const std::vector<EvalPair>& pairs) {
  PrfCounts counts;
  for (const auto& p : pairs) counts.add(p);
  return prf_from_counts(counts);
}

double acc_negative(const std::vector<EvalPair>& pairs) {
  std::size_t negatives = 0;
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    if (!p.gold.empty()) continue;
    ++negatives;
    if (p.predicted.empty() && !p.predicted_malformed) ++correct;
  }
  if (negatives == 0) throw ScoringError(ScoringError::Kind::NoNegatives, "no negative examples");
  return static_cast<double>(correct) / static_cast<double>(negatives);
}

}  // namespace kgforge
