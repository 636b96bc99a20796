#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace kgforge {

// An entity mention over words [start_word, end_word). A mention is linked
// either to a KB entity (kb_id) or, for date mentions, to a year.
struct Mention {
  std::size_t start_word = 0;
  std::size_t end_word = 0;
  std::string surface;
  std::string title;
  std::optional<std::string> kb_id;
  std::optional<int> year;

  // The label a mention anchors in a triple: the title, or the year for
  // date mentions.
  std::string entity_label() const {
    if (year) return std::to_string(*year);
    return title;
  }

  friend bool operator==(const Mention&, const Mention&) = default;
};

struct AnnotatedSentence {
  std::string sent_id;
  std::vector<std::string> words;
  std::vector<Mention> mentions;

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

}  // namespace kgforge
