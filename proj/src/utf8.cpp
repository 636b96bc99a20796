#include "kgforge/utf8.hpp"

namespace kgforge::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_cont(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

char32_t next(std::string_view text, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > text.size()) {
    ++pos;
    return kReplacement;
  }
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if (!is_cont(b)) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += len;
  return cp;
}

bool is_valid(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t before = pos;
    const char32_t cp = next(text, pos);
    if (cp == kReplacement && pos - before != 3) return false;
  }
  return true;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_upper(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return true;
  if (cp < 0xC0) return false;
  if (cp <= 0xDE) return cp != 0xD7;
  if (cp >= 0x100 && cp <= 0x137) return cp % 2 == 0;
  if (cp >= 0x139 && cp <= 0x148) return cp % 2 == 1;
  if (cp >= 0x14A && cp <= 0x177) return cp % 2 == 0;
  if (cp == 0x178) return true;
  if (cp >= 0x179 && cp <= 0x17E) return cp % 2 == 1;
  if (cp == 0x386 || (cp >= 0x388 && cp <= 0x38F && cp != 0x38B && cp != 0x38D)) return true;
  if (cp >= 0x391 && cp <= 0x3AB) return cp != 0x3A2;
  if (cp >= 0x400 && cp <= 0x42F) return true;
  if (cp >= 0x531 && cp <= 0x556) return true;
  return false;
}

std::vector<ByteSpan> word_spans(std::string_view text) {
  std::vector<ByteSpan> spans;
  std::size_t pos = 0;
  bool in_word = false;
  std::size_t start = 0;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const bool space = is_space(next(text, pos));
    if (space && in_word) {
      spans.push_back({start, at});
      in_word = false;
    } else if (!space && !in_word) {
      start = at;
      in_word = true;
    }
  }
  if (in_word) spans.push_back({start, text.size()});
  return spans;
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  for (const auto& s : word_spans(text)) words.emplace_back(text.substr(s.begin, s.end - s.begin));
  return words;
}

std::string normalize_space(std::string_view text) {
  const auto words = split_words(text);
  return join(words, 0, words.size());
}

std::string join(const std::vector<std::string>& words, std::size_t begin, std::size_t end,
                 std::string_view sep) {
  std::string out;
  for (std::size_t i = begin; i < end && i < words.size(); ++i) {
    if (i > begin) out += sep;
    out += words[i];
  }
  return out;
}

}  // namespace kgforge::utf8
