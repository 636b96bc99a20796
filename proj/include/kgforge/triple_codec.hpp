#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/error.hpp"
#include "kgforge/sentence.hpp"

namespace kgforge {

class CodecError : public Error {
 public:
  enum class Kind { MalformedSequence, InvalidLabel, UnanchoredEntity, UnorderedLinks };

  CodecError(Kind kind, const std::string& message, std::size_t position = 0,
             std::string expected = {})
      : Error(message), kind_(kind), position_(position), expected_(std::move(expected)) {}

  Kind kind() const { return kind_; }
  // For MalformedSequence: token index of the failure and what was expected.
  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::string expected_;
};

inline constexpr std::string_view kSubToken = "<sub>";
inline constexpr std::string_view kRelToken = "<rel>";
inline constexpr std::string_view kObjToken = "<obj>";
inline constexpr std::string_view kEtToken = "<et>";
inline constexpr std::string_view kEntitySection = "[ENTITY]";
inline constexpr std::string_view kTripleSection = "[TRIPLE]";
inline constexpr std::string_view kElTag = "<#el#>";
inline constexpr std::string_view kTriTag = "<#tri#>";

struct Triple {
  std::string head;
  std::string relation;
  std::string tail;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

struct MentionLink {
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::string mention;
  std::string entity_label;

  friend bool operator==(const MentionLink&, const MentionLink&) = default;
};

// True for <sub>, <rel>, <obj>, <et>, [ENTITY] and [TRIPLE].
bool is_structural_token(std::string_view token);

// Sort key: first word index of a mention anchoring the head label, then the
// same for the tail label, then relation label. Each triple appears once.
std::vector<Triple> order_triples(const AnnotatedSentence& sentence,
                                  const std::set<Triple>& triples);

// "<sub> H <rel> R <obj> T <et>" per triple, single spaces; empty list gives
// the empty string. Label whitespace is normalized; labels that are empty or
// contain a structural token are rejected.
std::string linearize(const std::vector<Triple>& triples);

// Inverse of linearize. An empty or whitespace-only sequence is a negative
// example and yields an empty list.
std::vector<Triple> parse_triples(std::string_view sequence);

// "[ENTITY] m1 # L1 | m2 # L2 [TRIPLE] <linearized>". Only links whose label
// takes part in some triple are kept; links must be ordered by span_start.
std::string build_entity_prompt_target(const std::vector<MentionLink>& links,
                                       const std::vector<Triple>& triples);

struct EntityPromptTarget {
  std::vector<std::pair<std::string, std::string>> links;  // (mention, label)
  std::vector<Triple> triples;
};

EntityPromptTarget parse_entity_prompt_target(std::string_view sequence);

std::vector<std::string> prepend_task_token(const std::vector<std::string>& words,
                                            std::string_view tag);

// Mentions of the sentence whose label is a head or tail of a triple, as
// ordered links.
std::vector<MentionLink> links_for_triples(const AnnotatedSentence& sentence,
                                           const std::vector<Triple>& triples);

}  // namespace kgforge
