#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgforge {

using TokenId = std::int32_t;

// Ids of the structural symbols plus the vocabulary size. Any tokenizer can
// populate this; the special ids need not be contiguous.
struct VocabInfo {
  TokenId sub = 0;
  TokenId rel = 0;
  TokenId obj = 0;
  TokenId et = 0;
  TokenId eos = 0;
  TokenId entity_marker = 0;
  TokenId triple_marker = 0;
  TokenId mask = 0;
  TokenId e_open = 0;
  TokenId e_close = 0;
  TokenId el_tag = 0;
  TokenId tri_tag = 0;
  TokenId unk = 0;
  std::size_t size = 0;

  std::vector<TokenId> specials() const;
  bool is_special(TokenId id) const;
  // Throws std::invalid_argument unless specials are distinct and < size.
  void validate() const;
};

// Reference whitespace tokenizer. Specials take ids 0..12 in the order of
// kSpecialTokens; the remaining tokens follow in byte-lexicographic order,
// which makes the id assignment a pure function of the token set.
class Vocabulary {
 public:
  static constexpr std::string_view kSpecialTokens[] = {
      "</s>", "<sub>", "<rel>", "<obj>", "<et>", "[ENTITY]", "[TRIPLE]",
      "<mask>", "<e>", "</e>", "<#el#>", "<#tri#>", "<unk>"};
  static constexpr std::size_t kSpecialCount = std::size(kSpecialTokens);

  Vocabulary() : Vocabulary(std::set<std::string>{}) {}
  explicit Vocabulary(const std::set<std::string>& tokens);

  // Every whitespace token of every label.
  static Vocabulary from_labels(const std::vector<std::string>& labels);
  // One token per line; order and duplicates in the file do not matter.
  static Vocabulary load(std::istream& in);
  static Vocabulary load(const std::filesystem::path& path);
  // Regular tokens only, sorted, LF-terminated.
  void save(std::ostream& out) const;

  TokenId id(std::string_view token) const;  // unk for unknown tokens
  const std::string& token(TokenId id) const;
  std::vector<TokenId> encode(std::string_view text) const;
  std::vector<TokenId> encode_words(const std::vector<std::string>& words) const;
  std::string decode(const std::vector<TokenId>& ids) const;

  std::size_t size() const { return tokens_.size(); }
  const VocabInfo& info() const { return info_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  VocabInfo info_;
};

}  // namespace kgforge
