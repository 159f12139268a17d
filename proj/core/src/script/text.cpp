#include "audiobook/script/text.hpp"

#include <cctype>
#include <cstdint>

namespace audiobook {
namespace {

bool is_word_char(unsigned char c) { return c < 0x80 && std::isalnum(c); }

}  // namespace

std::string normalize_word(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_word_char(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !is_word_char(static_cast<unsigned char>(token[e - 1]))) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    const auto c = static_cast<unsigned char>(token[i]);
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

std::vector<Word> tokenize_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) {
      std::string raw(text.substr(start, i - start));
      std::string norm = normalize_word(raw);
      if (!norm.empty()) words.push_back({std::move(raw), std::move(norm)});
    }
  }
  return words;
}

bool ends_sentence(std::string_view raw) {
  std::size_t e = raw.size();
  while (e > 0 && (raw[e - 1] == '"' || raw[e - 1] == '\'' || raw[e - 1] == ')' ||
                   raw[e - 1] == ']')) {
    --e;
  }
  if (e == 0) return false;
  const char c = raw[e - 1];
  return c == '.' || c == '!' || c == '?';
}

bool ends_clause(std::string_view raw) {
  if (raw.empty()) return false;
  const char c = raw.back();
  return c == ',' || c == ';' || c == ':';
}

bool is_valid_utf8(std::string_view text, std::size_t* error_offset) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      if (error_offset) *error_offset = i;
      return false;
    }
    if (i + len > n) {
      if (error_offset) *error_offset = i;
      return false;
    }
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc & 0xC0) != 0x80) {
        if (error_offset) *error_offset = i;
        return false;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      if (error_offset) *error_offset = i;
      return false;
    }
    i += len;
  }
  return true;
}

}  // namespace audiobook
