#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace audiobook {

// CMU-style pronouncing lexicon: "WORD  PH1 PH2 ..." per line, ";;;"
// comments, ARPAbet symbols. Stress digits are dropped on load and
// alternate pronunciations ("WORD(2)") are ignored.
class PronouncingLexicon {
 public:
  static PronouncingLexicon parse(std::string_view text);
  static const PronouncingLexicon& builtin();

  // Lookup by normalized (lowercase) word.
  const std::vector<std::string>* find(const std::string& word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// Greedy longest-match grapheme rules for words missing from the lexicon.
std::vector<std::string> letter_to_sound(const std::string& normalized_word);

// Normalizes the word, then looks it up, falling back to letter_to_sound.
// Throws std::invalid_argument when nothing is left after normalization.
std::vector<std::string> phonemize(std::string_view word,
                                   const PronouncingLexicon& lexicon = PronouncingLexicon::builtin());

bool is_vowel(const std::string& phoneme);
// Base duration in seconds at the reference speaking rate.
double phoneme_base_duration(const std::string& phoneme);

}  // namespace audiobook
