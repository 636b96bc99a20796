#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgforge::utf8 {

// Decodes the code point starting at text[pos] and advances pos past it.
// Invalid sequences decode as U+FFFD and consume a single byte.
char32_t next(std::string_view text, std::size_t& pos);

bool is_valid(std::string_view text);

// Unicode White_Space property.
bool is_space(char32_t cp);

// Uppercase letters in Latin, Greek, Cyrillic and Armenian blocks.
bool is_upper(char32_t cp);

struct ByteSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Byte ranges of the maximal runs of non-whitespace in text.
std::vector<ByteSpan> word_spans(std::string_view text);

std::vector<std::string> split_words(std::string_view text);

// Words joined by single spaces.
std::string normalize_space(std::string_view text);

std::string join(const std::vector<std::string>& words, std::size_t begin,
                 std::size_t end, std::string_view sep = " ");

}  // namespace kgforge::utf8
