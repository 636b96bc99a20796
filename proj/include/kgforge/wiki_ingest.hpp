#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgforge/sentence.hpp"

namespace kgforge {

struct RawDocument {
  std::string doc_id;
  std::string text;
  std::optional<std::string> source_domain;
};

// A wikilink resolved in clean text; [begin, end) are byte offsets of the
// replacement text.
struct WikiLink {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string title;
  std::string display;

  friend bool operator==(const WikiLink&, const WikiLink&) = default;
};

struct CleanText {
  std::string text;
  std::vector<WikiLink> links;
};

// Replaces [[title|display]] by display and [[title]] by title. Malformed or
// unclosed brackets pass through verbatim. An inner "[[" before the closing
// "]]" starts a new link; the outer brackets stay as plain text.
CleanText parse_wikilinks(std::string_view text);

// Rule-based splitter: a sentence ends at '.', '!' or '?' followed by
// whitespace and then an uppercase letter, or by end of text. Single
// uppercase initials ("J.") never end a sentence, and no split happens
// inside a link span. Link spans become word-index mentions.
std::vector<AnnotatedSentence> segment_sentences(std::string_view clean_text,
                                                 const std::vector<WikiLink>& links,
                                                 std::string_view doc_id = "doc");

enum class FilterReason { Kept, NoMention, TooLong };

inline constexpr std::size_t kMaxEntityCsWords = 128;
inline constexpr std::size_t kMinWebWords = 10;

FilterReason filter_for_entitycs(const AnnotatedSentence& s);
bool filter_for_web(const AnnotatedSentence& s);

const char* to_string(FilterReason r);

// parse_wikilinks followed by segment_sentences.
std::vector<AnnotatedSentence> ingest_document(const RawDocument& doc);

}  // namespace kgforge
