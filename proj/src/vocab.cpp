#include "kgforge/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "kgforge/utf8.hpp"

namespace kgforge {

std::vector<TokenId> VocabInfo::specials() const {
  return {sub, rel, obj, et, eos, entity_marker, triple_marker, mask, e_open, e_close,
          el_tag, tri_tag, unk};
}

bool VocabInfo::is_special(TokenId id) const {
  const auto s = specials();
  return std::find(s.begin(), s.end(), id) != s.end();
}

void VocabInfo::validate() const {
  auto s = specials();
  for (TokenId id : s) {
    if (id < 0 || static_cast<std::size_t>(id) >= size)
      throw std::invalid_argument("special token id out of range");
  }
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("special token ids are not distinct");
}

Vocabulary::Vocabulary(const std::set<std::string>& tokens) {
  for (auto t : kSpecialTokens) tokens_.emplace_back(t);
  for (const auto& t : tokens) {
    if (std::find(std::begin(kSpecialTokens), std::end(kSpecialTokens), t) !=
        std::end(kSpecialTokens))
      continue;
    tokens_.push_back(t);
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    ids_.emplace(tokens_[i], static_cast<TokenId>(i));
  info_ = VocabInfo{id("<sub>"),  id("<rel>"),    id("<obj>"), id("<et>"),    id("</s>"),
                    id("[ENTITY]"), id("[TRIPLE]"), id("<mask>"), id("<e>"),   id("</e>"),
                    id("<#el#>"), id("<#tri#>"),  id("<unk>"), tokens_.size()};
}

Vocabulary Vocabulary::from_labels(const std::vector<std::string>& labels) {
  std::set<std::string> tokens;
  for (const auto& l : labels)
    for (auto& w : utf8::split_words(l)) tokens.insert(std::move(w));
  return Vocabulary(tokens);
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::set<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& w : utf8::split_words(line)) tokens.insert(std::move(w));
  }
  return Vocabulary(tokens);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vocabulary " + path.string());
  return load(in);
}

void Vocabulary::save(std::ostream& out) const {
  for (std::size_t i = kSpecialCount; i < tokens_.size(); ++i) out << tokens_[i] << '\n';
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? info_.unk : it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size())
    throw std::out_of_range("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<TokenId> Vocabulary::encode(std::string_view text) const {
  return encode_words(utf8::split_words(text));
}

std::vector<TokenId> Vocabulary::encode_words(const std::vector<std::string>& words) const {
  std::vector<TokenId> ids;
  ids.reserve(words.size());
  for (const auto& w : words) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::decode(const std::vector<TokenId>& ids) const {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += token(ids[i]);
  }
  return out;
}

}  // namespace kgforge
