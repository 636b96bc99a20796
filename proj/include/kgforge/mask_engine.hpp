#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgforge/error.hpp"
#include "kgforge/rng.hpp"
#include "kgforge/vocab.hpp"

namespace kgforge {

class MaskError : public Error {
 public:
  enum class Kind { OverlappingSpans, SpanOutOfBounds, EmptyVocab, BadConfig };
  MaskError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class MaskStrategy { MLM, WEP, PEP_MRS, PEP_MS, PEP_M };

std::string_view to_string(MaskStrategy s);
std::optional<MaskStrategy> parse_strategy(std::string_view name);

// Percentages of candidates replaced by MASK, by a random token, or kept as
// the same token (still predicted). Whatever is left of 100 is kept and not
// predicted.
struct BranchSplit {
  int mask = 0;
  int rnd = 0;
  int same = 0;

  friend bool operator==(const BranchSplit&, const BranchSplit&) = default;
};

struct MaskingConfig {
  MaskStrategy strategy = MaskStrategy::MLM;
  bool with_mlm = false;
  double p_entity = 0.0;  // candidate probability for entity items
  double p_token = 0.0;   // candidate probability for non-entity tokens
  BranchSplit entity_branch;
  BranchSplit token_branch;

  void validate() const;
  friend bool operator==(const MaskingConfig&, const MaskingConfig&) = default;
};

// The masking-strategy table: MLM 15% at 80/10/10; WEP and PEP variants at
// p = 100% on entities, lowered to 50% when joined with 15% MLM on
// non-entity tokens.
MaskingConfig default_config(MaskStrategy strategy, bool with_mlm);

using Span = std::pair<std::size_t, std::size_t>;  // [start, end)

struct MaskedExample {
  std::vector<TokenId> input_ids;
  std::vector<std::optional<TokenId>> labels;  // nullopt = not predicted

  friend bool operator==(const MaskedExample&, const MaskedExample&) = default;
};

// Counters of the draws made by apply_masking. Entity counts are per item:
// per span under WEP, per token otherwise.
struct MaskingStats {
  struct Side {
    std::uint64_t items = 0;
    std::uint64_t candidates = 0;
    std::uint64_t masked = 0;
    std::uint64_t random = 0;
    std::uint64_t same = 0;
    std::uint64_t unpredicted = 0;  // candidate left unchanged and unlabeled
  };
  Side entity;
  Side token;

  void merge(const MaskingStats& other);
};

// Draw order: entity items in span order (one candidate draw u and, for a
// candidate, one branch draw v each), then non-entity tokens left to right.
// Under MLM the spans are ignored and every token is a non-entity token.
MaskedExample apply_masking(const std::vector<TokenId>& tokens, const std::vector<Span>& spans,
                            const MaskingConfig& cfg, RandomSource& rng, const VocabInfo& vocab,
                            MaskingStats* stats = nullptr);

}  // namespace kgforge
