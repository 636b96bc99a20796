#include "kgforge/code_switch.hpp"

#include <algorithm>

#include "kgforge/utf8.hpp"

namespace kgforge {

namespace {

const std::string& require_kb_id(const AnnotatedSentence& s, const Mention& m) {
  if (!m.kb_id)
    throw CodeSwitchError(CodeSwitchError::Kind::MissingKbId,
                          "mention '" + m.surface + "' in " + s.sent_id + " has no kb_id");
  return *m.kb_id;
}

CsSentence switch_to(const AnnotatedSentence& s, const KbStore& kb, const std::string& lang) {
  CsSentence out;
  out.base_sent_id = s.sent_id;
  out.language = lang;
  std::size_t next = 0;
  for (const Mention& m : s.mentions) {
    out.words.insert(out.words.end(), s.words.begin() + next, s.words.begin() + m.start_word);
    const std::string& label = kb.entity(*m.kb_id)->labels.at(lang);
    out.words.emplace_back(kEntityOpen);
    Mention switched = m;
    switched.start_word = out.words.size();
    for (auto& w : utf8::split_words(label)) out.words.push_back(std::move(w));
    switched.end_word = out.words.size();
    switched.surface = utf8::join(out.words, switched.start_word, switched.end_word);
    out.words.emplace_back(kEntityClose);
    out.mentions.push_back(std::move(switched));
    next = m.end_word;
  }
  out.words.insert(out.words.end(), s.words.begin() + next, s.words.end());
  return out;
}

}  // namespace

std::set<std::string> candidate_languages(const AnnotatedSentence& s, const KbStore& kb,
                                          const std::set<std::string>& allowed) {
  std::set<std::string> out;
  if (s.mentions.empty()) return out;
  for (const auto& m : s.mentions) require_kb_id(s, m);
  for (const auto& lang : allowed) {
    if (lang == kSourceLanguage) continue;
    const bool all = std::all_of(s.mentions.begin(), s.mentions.end(), [&](const Mention& m) {
      const EntityRecord* rec = kb.entity(*m.kb_id);
      return rec && rec->labels.count(lang) > 0;
    });
    if (all) out.insert(lang);
  }
  return out;
}

std::vector<CsSentence> generate_cs(const AnnotatedSentence& s, const KbStore& kb,
                                    const std::set<std::string>& allowed,
                                    std::size_t max_variants, RandomSource& rng) {
  std::vector<std::string> langs;
  {
    const auto candidates = candidate_languages(s, kb, allowed);
    langs.assign(candidates.begin(), candidates.end());
  }
  if (langs.empty() || max_variants == 0) {
    return {CsSentence{s.sent_id, kSourceLanguage, s.words, s.mentions}};
  }
  if (langs.size() > max_variants) {
    // Partial Fisher-Yates: the first max_variants slots are a uniform sample.
    for (std::size_t i = 0; i < max_variants; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(langs.size() - i));
      std::swap(langs[i], langs[j]);
    }
    langs.resize(max_variants);
    std::sort(langs.begin(), langs.end());
  }
  std::vector<CsSentence> out;
  out.reserve(langs.size());
  for (const auto& lang : langs) out.push_back(switch_to(s, kb, lang));
  return out;
}

std::vector<std::string> wrap_entities(const std::vector<std::string>& words,
                                       const std::vector<Mention>& mentions) {
  std::vector<std::string> out;
  out.reserve(words.size() + 2 * mentions.size());
  std::size_t next = 0;
  for (const auto& m : mentions) {
    out.insert(out.end(), words.begin() + next, words.begin() + m.start_word);
    out.emplace_back(kEntityOpen);
    out.insert(out.end(), words.begin() + m.start_word, words.begin() + m.end_word);
    out.emplace_back(kEntityClose);
    next = m.end_word;
  }
  out.insert(out.end(), words.begin() + next, words.end());
  return out;
}

StrippedWords strip_entity_markers(const std::vector<std::string>& words) {
  StrippedWords out;
  out.words.reserve(words.size());
  bool open = false;
  std::size_t start = 0;
  for (const auto& w : words) {
    if (w == kEntityOpen) {
      if (open)
        throw CodeSwitchError(CodeSwitchError::Kind::UnbalancedMarkers, "nested <e> marker");
      open = true;
      start = out.words.size();
    } else if (w == kEntityClose) {
      if (!open)
        throw CodeSwitchError(CodeSwitchError::Kind::UnbalancedMarkers, "</e> without <e>");
      open = false;
      out.entity_spans.emplace_back(start, out.words.size());
    } else {
      out.words.push_back(w);
    }
  }
  if (open) throw CodeSwitchError(CodeSwitchError::Kind::UnbalancedMarkers, "unclosed <e>");
  return out;
}

}  // namespace kgforge
