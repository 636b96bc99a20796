#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/error.hpp"
#include "kgforge/kb_store.hpp"
#include "kgforge/rng.hpp"
#include "kgforge/sentence.hpp"
#include "kgforge/triple_codec.hpp"

namespace kgforge {

class DsError : public Error {
 public:
  enum class Kind { ScoreOutOfRange, BadThreshold, BadFraction, BadRatios };
  DsError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr double kDefaultEntailmentThreshold = 0.7;
inline constexpr double kDefaultNegativeFraction = 0.5;
inline constexpr std::array<double, 3> kDefaultSplitRatios{0.9, 0.05, 0.05};

// Year of "Month D, YYYY", "D Month YYYY" or a bare "YYYY" (1000-2999).
std::optional<int> normalize_date(std::string_view text);

// Turns an entity-linked sentence into a LinkedSentence: mentions with a
// kb_id (given, or resolved from the title through the KB) keep it and take
// the KB's canonical title; other mentions that read as dates get a year;
// anything else is dropped.
AnnotatedSentence to_linked_sentence(const AnnotatedSentence& s, const KbStore& kb);

// A DS triple with both its KB ids and its labels.
struct LinkedTriple {
  KbTriple ids;
  Triple labels;

  friend auto operator<=>(const LinkedTriple&, const LinkedTriple&) = default;
};

// For every ordered pair of distinct mentions, one triple per stored relation
// between them. Year mentions are tails only.
std::set<LinkedTriple> extract_ds_triples(const AnnotatedSentence& linked, const KbStore& kb);

struct ScoredTriple {
  Triple triple;
  double score = 0.0;
};

// Reduces scores by maximum per triple and keeps triples scoring strictly
// above threshold, in order of first appearance.
std::vector<Triple> entailment_filter(const std::vector<ScoredTriple>& scored,
                                      double threshold = kDefaultEntailmentThreshold);

enum class ExampleLabel { Positive, NegativeFewEntities, NegativeNoRelation };

std::string_view to_string(ExampleLabel label);
std::optional<ExampleLabel> parse_example_label(std::string_view name);

// Entity mentions are the KB-linked ones; year mentions do not count.
ExampleLabel classify_example(const AnnotatedSentence& linked,
                              const std::vector<Triple>& triples_after_filter);

struct NegativeSample {
  std::vector<std::size_t> selected;  // input indices, ascending
  std::size_t positives = 0;
  std::size_t few_entities = 0;
  std::size_t no_relation = 0;
  double achieved_fraction = 0.0;
  bool insufficient = false;  // not enough negatives to reach the target
};

// Keeps every positive and samples negatives uniformly, half from each kind,
// so negatives make up `fraction` of the result to within one example. When
// one kind runs out the other kind fills the gap.
NegativeSample sample_negatives(const std::vector<ExampleLabel>& labels, double fraction,
                                RandomSource& rng);

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

// Sizes by largest remainder (ties favour the earlier split), records
// assigned by a uniform shuffle; indices within a split are ascending.
DatasetSplit split_dataset(std::size_t n, const std::array<double, 3>& ratios, RandomSource& rng);

std::array<std::size_t, 3> split_sizes(std::size_t n, const std::array<double, 3>& ratios);

}  // namespace kgforge
