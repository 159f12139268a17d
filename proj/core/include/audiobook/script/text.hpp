#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace audiobook {

struct Word {
  std::string raw;   // token as written, punctuation included
  std::string norm;  // lowercased, outer punctuation stripped
};

// Lowercases ASCII and strips leading/trailing characters that are not
// letters, digits or inner apostrophes. Non-ASCII bytes count as
// punctuation, so a lone dash token normalizes to "".
std::string normalize_word(std::string_view token);

// Whitespace split followed by normalize_word; tokens that normalize to ""
// are skipped. The word indices used by cue anchors and transcripts both
// come from this function.
std::vector<Word> tokenize_words(std::string_view text);

// True when the raw token closes a sentence (., !, ? possibly followed by
// closing quotes or brackets).
bool ends_sentence(std::string_view raw);
bool ends_clause(std::string_view raw);

bool is_valid_utf8(std::string_view text, std::size_t* error_offset = nullptr);

}  // namespace audiobook
