#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgforge/error.hpp"
#include "kgforge/vocab.hpp"

namespace kgforge {

class TrieError : public Error {
 public:
  enum class Kind {
    EmptyLabelSet,
    EmptySequence,
    SpecialTokenInLabel,
    DisallowedToken,
    LengthMismatch,
    EnumerationTooLarge,
  };
  TrieError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using NodeId = std::uint32_t;

// Token-sequence trie. Node 0 is the root.
class PrefixTrie {
 public:
  static PrefixTrie build(const std::vector<std::vector<TokenId>>& labels, const VocabInfo& vocab);

  NodeId root() const { return 0; }
  bool is_terminal(NodeId node) const { return nodes_.at(node).terminal; }
  const std::map<TokenId, NodeId>& children(NodeId node) const { return nodes_.at(node).children; }
  std::optional<NodeId> child(NodeId node, TokenId token) const;
  bool contains(const std::vector<TokenId>& seq) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t label_count() const { return label_count_; }

 private:
  struct Node {
    std::map<TokenId, NodeId> children;
    bool terminal = false;
  };
  std::vector<Node> nodes_;
  std::size_t label_count_ = 0;
};

// Entity and relation tries are kept apart; heads and tails read from the
// first, relations from the second.
struct ConstraintTries {
  PrefixTrie entities;
  PrefixTrie relations;
};

enum class DecodePhase { Start, InHead, InRelation, InTail, AfterTriple, Free, Finished };
enum class DecodeMode { FullConstraint, PartialAfterMarker };

const char* to_string(DecodePhase p);

// Small value type; clone one per beam hypothesis.
struct DecodeState {
  DecodePhase phase = DecodePhase::Start;
  NodeId cursor = 0;
  std::size_t triples_emitted = 0;
  DecodeMode mode = DecodeMode::FullConstraint;

  // Full mode starts constrained; partial mode starts free until [TRIPLE].
  static DecodeState initial(DecodeMode mode);

  friend bool operator==(const DecodeState&, const DecodeState&) = default;
};

// Sorted ids of the tokens the grammar admits next. EOS ends generation
// at Start and AfterTriple; Free admits the whole vocabulary.
std::vector<TokenId> allowed_next(const DecodeState& state, const ConstraintTries& tries,
                                  const VocabInfo& vocab);

// Throws DisallowedToken unless token is in allowed_next(state).
DecodeState advance(const DecodeState& state, TokenId token, const ConstraintTries& tries,
                    const VocabInfo& vocab);

// Disallowed positions become -infinity; allowed ones are unchanged.
std::vector<double> mask_scores(std::span<const double> scores, const std::vector<TokenId>& allowed,
                                const VocabInfo& vocab);

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

// Every token sequence, ending in EOS, that full-constraint decoding can
// produce with at most max_triples triples. Sorted lexicographically.
std::vector<std::vector<TokenId>> complete_sequences(const ConstraintTries& tries,
                                                     const VocabInfo& vocab,
                                                     std::size_t max_triples,
                                                     std::size_t cap = kDefaultEnumerationCap);

// Tokenizes labels with `vocab` and builds both tries.
ConstraintTries build_constraint_tries(const std::vector<std::string>& entity_labels,
                                       const std::vector<std::string>& relation_labels,
                                       const Vocabulary& vocab);

}  // namespace kgforge
