#include "kgforge/wiki_ingest.hpp"

#include <algorithm>

#include "kgforge/utf8.hpp"

namespace kgforge {

namespace {

std::string_view trim(std::string_view s) {
  const auto spans = utf8::word_spans(s);
  if (spans.empty()) return {};
  return s.substr(spans.front().begin, spans.back().end - spans.front().begin);
}

bool ends_with_terminal(std::string_view word) {
  const char last = word.back();
  return last == '.' || last == '!' || last == '?';
}

// "J." style initials: one uppercase letter and a period.
bool is_initial(std::string_view word) {
  if (word.size() < 2 || word.back() != '.') return false;
  std::size_t pos = 0;
  const char32_t cp = utf8::next(word, pos);
  return pos == word.size() - 1 && utf8::is_upper(cp);
}

bool starts_upper(std::string_view word) {
  std::size_t pos = 0;
  return utf8::is_upper(utf8::next(word, pos));
}

}  // namespace

CleanText parse_wikilinks(std::string_view text) {
  CleanText out;
  out.text.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find("[[", pos);
    if (open == std::string_view::npos) {
      out.text.append(text.substr(pos));
      break;
    }
    out.text.append(text.substr(pos, open - pos));
    const std::size_t close = text.find("]]", open + 2);
    if (close == std::string_view::npos) {
      out.text.append(text.substr(open));
      break;
    }
    const std::size_t inner = text.find("[[", open + 2);
    if (inner != std::string_view::npos && inner < close) {
      out.text.append(text.substr(open, inner - open));
      pos = inner;
      continue;
    }
    const std::string_view body = text.substr(open + 2, close - open - 2);
    const std::size_t bar = body.find('|');
    const std::string_view title = trim(body.substr(0, bar));
    const std::string_view display =
        bar == std::string_view::npos ? title : trim(body.substr(bar + 1));
    if (title.empty() || display.empty()) {
      out.text.append(text.substr(open, close + 2 - open));
    } else {
      WikiLink link;
      link.begin = out.text.size();
      out.text.append(display);
      link.end = out.text.size();
      link.title = std::string(title);
      link.display = std::string(display);
      out.links.push_back(std::move(link));
    }
    pos = close + 2;
  }
  return out;
}

std::vector<AnnotatedSentence> segment_sentences(std::string_view clean_text,
                                                 const std::vector<WikiLink>& links,
                                                 std::string_view doc_id) {
  const auto spans = utf8::word_spans(clean_text);
  std::vector<AnnotatedSentence> sentences;
  if (spans.empty()) return sentences;

  auto word_at = [&](std::size_t i) {
    return clean_text.substr(spans[i].begin, spans[i].end - spans[i].begin);
  };
  auto gap_inside_link = [&](std::size_t i) {
    const std::size_t gap_begin = spans[i].end;
    const std::size_t gap_end = spans[i + 1].begin;
    // links are disjoint and in text order
    auto it = std::partition_point(links.begin(), links.end(),
                                   [&](const WikiLink& l) { return l.end <= gap_begin; });
    return it != links.end() && it->begin < gap_end;
  };

  // sentence_of[i] = index of the sentence holding word i
  std::vector<std::size_t> sentence_of(spans.size());
  std::vector<std::size_t> first_word{0};
  for (std::size_t i = 0; i < spans.size(); ++i) {
    sentence_of[i] = first_word.size() - 1;
    if (i + 1 == spans.size()) break;
    const std::string_view w = word_at(i);
    if (ends_with_terminal(w) && !is_initial(w) && starts_upper(word_at(i + 1)) &&
        !gap_inside_link(i)) {
      first_word.push_back(i + 1);
    }
  }

  sentences.resize(first_word.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    sentences[s].sent_id = std::string(doc_id) + ":" + std::to_string(s);
    const std::size_t end = s + 1 < first_word.size() ? first_word[s + 1] : spans.size();
    for (std::size_t i = first_word[s]; i < end; ++i) sentences[s].words.emplace_back(word_at(i));
  }

  for (const auto& link : links) {
    // Words overlapping the link; partial-word links widen to whole words.
    auto first = std::partition_point(spans.begin(), spans.end(),
                                      [&](const utf8::ByteSpan& w) { return w.end <= link.begin; });
    if (first == spans.end() || first->begin >= link.end) continue;
    std::size_t lo = static_cast<std::size_t>(first - spans.begin());
    std::size_t hi = lo;
    while (hi < spans.size() && spans[hi].begin < link.end) ++hi;
    AnnotatedSentence& sent = sentences[sentence_of[lo]];
    const std::size_t offset = first_word[sentence_of[lo]];
    Mention m;
    m.start_word = lo - offset;
    m.end_word = hi - offset;
    m.surface = utf8::join(sent.words, m.start_word, m.end_word);
    m.title = link.title;
    // Two links sharing a word would overlap; the earlier one wins.
    if (!sent.mentions.empty() && sent.mentions.back().end_word > m.start_word) continue;
    sent.mentions.push_back(std::move(m));
  }
  return sentences;
}

FilterReason filter_for_entitycs(const AnnotatedSentence& s) {
  if (s.mentions.empty()) return FilterReason::NoMention;
  if (s.words.size() > kMaxEntityCsWords) return FilterReason::TooLong;
  return FilterReason::Kept;
}

bool filter_for_web(const AnnotatedSentence& s) { return s.words.size() >= kMinWebWords; }

const char* to_string(FilterReason r) {
  switch (r) {
    case FilterReason::Kept: return "Kept";
    case FilterReason::NoMention: return "NoMention";
    case FilterReason::TooLong: return "TooLong";
  }
  return "?";
}

std::vector<AnnotatedSentence> ingest_document(const RawDocument& doc) {
  const CleanText clean = parse_wikilinks(doc.text);
  return segment_sentences(clean.text, clean.links, doc.doc_id);
}

}  // namespace kgforge
