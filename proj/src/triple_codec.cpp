#include "kgforge/triple_codec.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "kgforge/utf8.hpp"

namespace kgforge {

namespace {

std::string checked_label(std::string_view label, std::string_view what) {
  const auto words = utf8::split_words(label);
  if (words.empty())
    throw CodecError(CodecError::Kind::InvalidLabel, "empty " + std::string(what) + " label");
  for (const auto& w : words) {
    if (is_structural_token(w))
      throw CodecError(CodecError::Kind::InvalidLabel,
                       std::string(what) + " label contains structural token " + w);
  }
  return utf8::join(words, 0, words.size());
}

// EL chains additionally reserve the separators "#" and "|".
std::string checked_el_text(std::string_view text, std::string_view what) {
  std::string out = checked_label(text, what);
  for (const auto& w : utf8::split_words(out)) {
    if (w == "#" || w == "|" || w == kElTag || w == kTriTag)
      throw CodecError(CodecError::Kind::InvalidLabel,
                       std::string(what) + " contains reserved token " + w);
  }
  return out;
}

CodecError malformed(std::size_t pos, std::string_view expected, std::string_view got) {
  return CodecError(CodecError::Kind::MalformedSequence,
                    "malformed sequence at token " + std::to_string(pos) + ": expected " +
                        std::string(expected) + ", got " +
                        (got.empty() ? std::string("end of sequence") : std::string(got)),
                    pos, std::string(expected));
}

std::vector<Triple> parse_tokens(const std::vector<std::string>& tokens, std::size_t offset) {
  std::vector<Triple> out;
  std::size_t i = 0;
  auto field = [&](std::string_view closer, std::string_view what) {
    std::size_t start = i;
    while (i < tokens.size() && !is_structural_token(tokens[i])) ++i;
    if (i == start) {
      throw malformed(offset + i, what, i < tokens.size() ? tokens[i] : std::string_view{});
    }
    if (i == tokens.size() || tokens[i] != closer)
      throw malformed(offset + i, closer, i < tokens.size() ? tokens[i] : std::string_view{});
    std::string text = utf8::join(tokens, start, i);
    ++i;
    return text;
  };
  while (i < tokens.size()) {
    if (tokens[i] != kSubToken) throw malformed(offset + i, kSubToken, tokens[i]);
    ++i;
    Triple t;
    t.head = field(kRelToken, "head label");
    t.relation = field(kObjToken, "relation label");
    t.tail = field(kEtToken, "tail label");
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

bool is_structural_token(std::string_view token) {
  return token == kSubToken || token == kRelToken || token == kObjToken || token == kEtToken ||
         token == kEntitySection || token == kTripleSection;
}

std::vector<Triple> order_triples(const AnnotatedSentence& sentence,
                                  const std::set<Triple>& triples) {
  std::map<std::string, std::size_t> first_pos;
  for (const auto& m : sentence.mentions) {
    const std::string label = m.entity_label();
    auto [it, inserted] = first_pos.emplace(label, m.start_word);
    if (!inserted) it->second = std::min(it->second, m.start_word);
  }
  auto anchor = [&](const std::string& label) {
    auto it = first_pos.find(label);
    if (it == first_pos.end())
      throw CodecError(CodecError::Kind::UnanchoredEntity,
                       "no mention of '" + label + "' in " + sentence.sent_id);
    return it->second;
  };
  using Key = std::tuple<std::size_t, std::size_t, std::string>;
  std::vector<std::pair<Key, const Triple*>> keyed;
  keyed.reserve(triples.size());
  for (const auto& t : triples) keyed.push_back({Key{anchor(t.head), anchor(t.tail), t.relation}, &t});
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Triple> out;
  out.reserve(keyed.size());
  for (const auto& [key, t] : keyed) out.push_back(*t);
  return out;
}

std::string linearize(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    if (!out.empty()) out += ' ';
    out += kSubToken;
    out += ' ' + checked_label(t.head, "head") + ' ';
    out += kRelToken;
    out += ' ' + checked_label(t.relation, "relation") + ' ';
    out += kObjToken;
    out += ' ' + checked_label(t.tail, "tail") + ' ';
    out += kEtToken;
  }
  return out;
}

std::vector<Triple> parse_triples(std::string_view sequence) {
  return parse_tokens(utf8::split_words(sequence), 0);
}

std::string build_entity_prompt_target(const std::vector<MentionLink>& links,
                                       const std::vector<Triple>& triples) {
  for (std::size_t i = 1; i < links.size(); ++i) {
    if (links[i].span_start < links[i - 1].span_start)
      throw CodecError(CodecError::Kind::UnorderedLinks, "entity links are not in text order");
  }
  std::set<std::string> used;
  for (const auto& t : triples) {
    used.insert(utf8::normalize_space(t.head));
    used.insert(utf8::normalize_space(t.tail));
  }
  std::string out(kEntitySection);
  bool first = true;
  for (const auto& link : links) {
    const std::string label = utf8::normalize_space(link.entity_label);
    if (!used.count(label)) continue;
    checked_el_text(label, "entity label");
    out += first ? " " : " | ";
    out += checked_el_text(link.mention, "mention") + " # " + label;
    first = false;
  }
  out += ' ';
  out += kTripleSection;
  const std::string lin = linearize(triples);
  if (!lin.empty()) out += ' ' + lin;
  return out;
}

EntityPromptTarget parse_entity_prompt_target(std::string_view sequence) {
  const auto tokens = utf8::split_words(sequence);
  if (tokens.empty() || tokens[0] != kEntitySection)
    throw malformed(0, kEntitySection, tokens.empty() ? std::string_view{} : tokens[0]);
  auto marker = std::find(tokens.begin(), tokens.end(), kTripleSection);
  if (marker == tokens.end()) throw malformed(tokens.size(), kTripleSection, {});
  const std::size_t split = static_cast<std::size_t>(marker - tokens.begin());

  EntityPromptTarget out;
  std::size_t i = 1;
  while (i < split) {
    const std::size_t start = i;
    while (i < split && tokens[i] != "#") ++i;
    if (i == start || i == split) throw malformed(i, "#", i < split ? tokens[i] : "");
    std::string mention = utf8::join(tokens, start, i);
    const std::size_t label_start = ++i;
    while (i < split && tokens[i] != "|") ++i;
    if (i == label_start) throw malformed(i, "entity label", i < split ? tokens[i] : "");
    out.links.emplace_back(std::move(mention), utf8::join(tokens, label_start, i));
    if (i < split) {
      ++i;
      if (i == split) throw malformed(i, "mention", tokens[i]);
    }
  }
  std::vector<std::string> rest(tokens.begin() + split + 1, tokens.end());
  out.triples = parse_tokens(rest, split + 1);
  return out;
}

std::vector<std::string> prepend_task_token(const std::vector<std::string>& words,
                                            std::string_view tag) {
  if (tag.empty()) throw std::invalid_argument("task tag must be non-empty");
  std::vector<std::string> out;
  out.reserve(words.size() + 1);
  out.emplace_back(tag);
  out.insert(out.end(), words.begin(), words.end());
  return out;
}

std::vector<MentionLink> links_for_triples(const AnnotatedSentence& sentence,
                                           const std::vector<Triple>& triples) {
  std::set<std::string> used;
  for (const auto& t : triples) {
    used.insert(t.head);
    used.insert(t.tail);
  }
  std::vector<MentionLink> links;
  for (const auto& m : sentence.mentions) {
    const std::string label = m.entity_label();
    if (used.count(label)) links.push_back({m.start_word, m.end_word, m.surface, label});
  }
  std::stable_sort(links.begin(), links.end(), [](const MentionLink& a, const MentionLink& b) {
    return a.span_start < b.span_start;
  });
  return links;
}

}  // namespace kgforge
