#include "audiobook/tts/phonemes.hpp"

#include <array>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "audiobook/data.hpp"
#include "audiobook/script/text.hpp"

namespace audiobook {
namespace {

struct Rule {
  std::string_view graphemes;
  std::vector<std::string> phonemes;
};

// Longer graphemes are listed first; lookup tries lengths 4..1.
const std::vector<Rule>& rules() {
  static const std::vector<Rule> table = {
      {"ough", {"AO"}}, {"eigh", {"EY"}},
      {"tch", {"CH"}}, {"sch", {"S", "K"}}, {"igh", {"AY"}}, {"dge", {"JH"}},
      {"ch", {"CH"}}, {"sh", {"SH"}}, {"th", {"TH"}}, {"ph", {"F"}}, {"wh", {"W"}},
      {"ck", {"K"}}, {"ng", {"NG"}}, {"qu", {"K", "W"}}, {"kn", {"N"}}, {"wr", {"R"}},
      {"ee", {"IY"}}, {"ea", {"IY"}}, {"oo", {"UW"}}, {"ou", {"AW"}}, {"ow", {"OW"}},
      {"oi", {"OY"}}, {"oy", {"OY"}}, {"ai", {"EY"}}, {"ay", {"EY"}}, {"au", {"AO"}},
      {"aw", {"AO"}}, {"or", {"AO", "R"}}, {"ar", {"AA", "R"}}, {"er", {"ER"}},
      {"ir", {"ER"}}, {"ur", {"ER"}}, {"ie", {"IY"}}, {"ue", {"UW"}}, {"oa", {"OW"}},
      {"a", {"AE"}}, {"b", {"B"}}, {"c", {"K"}}, {"d", {"D"}}, {"e", {"EH"}},
      {"f", {"F"}}, {"g", {"G"}}, {"h", {"HH"}}, {"i", {"IH"}}, {"j", {"JH"}},
      {"k", {"K"}}, {"l", {"L"}}, {"m", {"M"}}, {"n", {"N"}}, {"o", {"AA"}},
      {"p", {"P"}}, {"q", {"K"}}, {"r", {"R"}}, {"s", {"S"}}, {"t", {"T"}},
      {"u", {"AH"}}, {"v", {"V"}}, {"w", {"W"}}, {"x", {"K", "S"}}, {"y", {"Y"}},
      {"z", {"Z"}},
  };
  return table;
}

const std::array<std::vector<std::string>, 10>& digit_names() {
  static const std::array<std::vector<std::string>, 10> d = {{
      {"Z", "IH", "R", "OW"}, {"W", "AH", "N"}, {"T", "UW"}, {"TH", "R", "IY"},
      {"F", "AO", "R"}, {"F", "AY", "V"}, {"S", "IH", "K", "S"}, {"S", "EH", "V", "AH", "N"},
      {"EY", "T"}, {"N", "AY", "N"},
  }};
  return d;
}

const std::set<std::string>& vowels() {
  static const std::set<std::string> v = {"AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
                                          "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
  return v;
}

}  // namespace

PronouncingLexicon PronouncingLexicon::parse(std::string_view text) {
  PronouncingLexicon lex;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line.starts_with(";;;")) continue;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    if (word.find('(') != std::string::npos) continue;
    std::vector<std::string> phones;
    for (std::string p; ls >> p;) {
      while (!p.empty() && std::isdigit(static_cast<unsigned char>(p.back()))) p.pop_back();
      if (!p.empty()) phones.push_back(p);
    }
    if (phones.empty()) continue;
    std::string key;
    for (char c : word) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    lex.entries_.emplace(std::move(key), std::move(phones));
  }
  return lex;
}

const PronouncingLexicon& PronouncingLexicon::builtin() {
  static const PronouncingLexicon lex = parse(data::cmudict);
  return lex;
}

const std::vector<std::string>* PronouncingLexicon::find(const std::string& word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> letter_to_sound(const std::string& word) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const char c = word[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const auto& d = digit_names()[static_cast<std::size_t>(c - '0')];
      out.insert(out.end(), d.begin(), d.end());
      ++i;
      continue;
    }
    bool matched = false;
    for (std::size_t len = 4; len >= 1 && !matched; --len) {
      if (i + len > word.size()) continue;
      const std::string_view g(word.data() + i, len);
      for (const Rule& r : rules()) {
        if (r.graphemes == g) {
          out.insert(out.end(), r.phonemes.begin(), r.phonemes.end());
          i += len;
          matched = true;
          break;
        }
      }
    }
    if (!matched) ++i;  // apostrophes and non-ASCII bytes are silent
  }
  if (out.empty()) out.push_back("AH");
  return out;
}

std::vector<std::string> phonemize(std::string_view word, const PronouncingLexicon& lexicon) {
  const std::string norm = normalize_word(word);
  if (norm.empty()) {
    throw std::invalid_argument("phonemize: '" + std::string(word) + "' is empty after normalization");
  }
  if (const auto* hit = lexicon.find(norm)) return *hit;
  return letter_to_sound(norm);
}

bool is_vowel(const std::string& phoneme) { return vowels().contains(phoneme); }

double phoneme_base_duration(const std::string& p) {
  static const std::map<std::string, double> table = {
      {"AA", 0.11}, {"AE", 0.11}, {"AH", 0.07}, {"AO", 0.11}, {"AW", 0.14}, {"AY", 0.14},
      {"EH", 0.09}, {"ER", 0.11}, {"EY", 0.12}, {"IH", 0.07}, {"IY", 0.10}, {"OW", 0.12},
      {"OY", 0.14}, {"UH", 0.07}, {"UW", 0.10}, {"B", 0.06},  {"CH", 0.09}, {"D", 0.05},
      {"DH", 0.04}, {"F", 0.08},  {"G", 0.06},  {"HH", 0.05}, {"JH", 0.08}, {"K", 0.07},
      {"L", 0.06},  {"M", 0.06},  {"N", 0.05},  {"NG", 0.06}, {"P", 0.07},  {"R", 0.06},
      {"S", 0.09},  {"SH", 0.09}, {"T", 0.06},  {"TH", 0.07}, {"V", 0.05},  {"W", 0.05},
      {"Y", 0.05},  {"Z", 0.07},  {"ZH", 0.07},
  };
  const auto it = table.find(p);
  return it == table.end() ? 0.07 : it->second;
}

}  // namespace audiobook
