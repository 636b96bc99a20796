#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "kgforge/error.hpp"
#include "kgforge/triple_codec.hpp"

namespace kgforge {

class ScoringError : public Error {
 public:
  enum class Kind { EmptySequence, PositiveLogProb, NoOptions, NoNegatives };
  ScoringError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// exp(-mean(log_probs)); every value must be a finite log-probability <= 0.
double perplexity(std::span<const double> log_probs);

// Index of the option with the lowest perplexity; ties go to the lowest index.
std::size_t rank_options(const std::vector<std::vector<double>>& options);

// An empty set stands for the negative (empty-string) target.
struct EvalPair {
  std::set<Triple> predicted;
  std::set<Triple> gold;
  // The prediction could not be parsed; it scores as no triples but is not
  // a correct empty output either.
  bool predicted_malformed = false;
};

// Pooled counts; merge() is associative so workers can aggregate separately.
struct PrfCounts {
  std::uint64_t true_positives = 0;
  std::uint64_t predicted = 0;
  std::uint64_t gold = 0;

  void add(const EvalPair& pair);
  void merge(const PrfCounts& other);
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf prf_from_counts(const PrfCounts& counts);

// Micro-averaged precision / recall / F1 over exact (case-sensitive) triples.
Prf triple_prf(const std::vector<EvalPair>& pairs);

// Share of gold-negative pairs whose prediction is the empty target.
double acc_negative(const std::vector<EvalPair>& pairs);

}  // namespace kgforge
