#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kgforge/error.hpp"
#include "kgforge/kb_store.hpp"
#include "kgforge/rng.hpp"
#include "kgforge/sentence.hpp"

namespace kgforge {

class CodeSwitchError : public Error {
 public:
  enum class Kind { MissingKbId, UnbalancedMarkers };
  CodeSwitchError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr const char* kEntityOpen = "<e>";
inline constexpr const char* kEntityClose = "</e>";
inline constexpr const char* kSourceLanguage = "en";
inline constexpr std::size_t kDefaultMaxVariants = 5;

// One code-switched variant of an English sentence. In a switched variant
// each entity is wrapped in <e> ... </e> and its mention (indices in this
// marked word list, markers excluded) carries the target-language label.
struct CsSentence {
  std::string base_sent_id;
  std::string language;
  std::vector<std::string> words;
  std::vector<Mention> mentions;

  // Record id used for per-record seeding downstream.
  std::string record_id() const { return base_sent_id + "/" + language; }

  friend bool operator==(const CsSentence&, const CsSentence&) = default;
};

// Languages from `allowed` (never "en") in which every mention has a label.
std::set<std::string> candidate_languages(const AnnotatedSentence& s, const KbStore& kb,
                                          const std::set<std::string>& allowed);

// Up to max_variants single-language variants, chosen uniformly without
// replacement when there are more candidates, returned in language order.
// With no candidates (or max_variants == 0) the English sentence comes back
// unmarked as the only element.
std::vector<CsSentence> generate_cs(const AnnotatedSentence& s, const KbStore& kb,
                                    const std::set<std::string>& allowed,
                                    std::size_t max_variants, RandomSource& rng);

// Wraps each mention of `words` in entity markers without translating it.
std::vector<std::string> wrap_entities(const std::vector<std::string>& words,
                                       const std::vector<Mention>& mentions);

struct StrippedWords {
  std::vector<std::string> words;
  std::vector<std::pair<std::size_t, std::size_t>> entity_spans;  // [start, end)
};

StrippedWords strip_entity_markers(const std::vector<std::string>& words);

}  // namespace kgforge
