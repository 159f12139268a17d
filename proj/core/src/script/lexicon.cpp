#include "audiobook/script/lexicon.hpp"

#include <sstream>
#include <stdexcept>

#include "audiobook/data.hpp"

namespace audiobook {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <typename Fn>
void for_each_rule_line(std::string_view text, Fn fn) {
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto words = split_ws(line);
    if (!words.empty()) fn(line_no, words);
  }
}

double parse_number(const std::string& s, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) {
    throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

CueLexicon CueLexicon::parse(std::string_view text) {
  CueLexicon lex;
  for_each_rule_line(text, [&](int line_no, const std::vector<std::string>& w) {
    const auto bad = [&] {
      throw std::invalid_argument("cue lexicon line " + std::to_string(line_no) + ": malformed rule");
    };
    if (w[0] == "tier") {
      if (w.size() != 3) bad();
      lex.tiers_[w[1]] = parse_number(w[2], line_no);
    } else if (w[0] == "event") {
      if (w.size() < 3) bad();
      lex.events_.insert(w[1]);
      for (std::size_t i = 2; i < w.size(); ++i) lex.triggers_[w[i]] = w[1];
    } else if (w[0] == "direction") {
      if (w.size() < 3) bad();
      lex.directions_.push_back({{w.begin() + 2, w.end()}, parse_number(w[1], line_no)});
    } else if (w[0] == "distance") {
      if (w.size() < 3) bad();
      lex.distances_.push_back({{w.begin() + 2, w.end()}, w[1]});
    } else {
      bad();
    }
  });
  for (const auto& d : lex.distances_) {
    if (!lex.tiers_.contains(d.tier)) {
      throw std::invalid_argument("cue lexicon: distance rule names unknown tier " + d.tier);
    }
  }
  if (!lex.tiers_.contains("mid")) throw std::invalid_argument("cue lexicon: tier 'mid' is required");
  return lex;
}

const CueLexicon& CueLexicon::builtin() {
  static const CueLexicon lex = parse(data::cue_lexicon);
  return lex;
}

std::optional<std::string> CueLexicon::event_for(const std::string& word) const {
  const auto it = triggers_.find(word);
  if (it == triggers_.end()) return std::nullopt;
  return it->second;
}

double CueLexicon::tier_distance(const std::string& tier) const {
  const auto it = tiers_.find(tier);
  if (it == tiers_.end()) throw std::out_of_range("unknown distance tier " + tier);
  return it->second;
}

SentimentLexicon::SentimentLexicon(std::map<std::string, double> valence)
    : valence_(std::move(valence)) {
  if (valence_.empty()) throw std::invalid_argument("sentiment lexicon is empty");
}

SentimentLexicon SentimentLexicon::parse(std::string_view text) {
  std::map<std::string, double> v;
  for_each_rule_line(text, [&](int line_no, const std::vector<std::string>& w) {
    if (w.size() != 2) {
      throw std::invalid_argument("sentiment lexicon line " + std::to_string(line_no) + ": expected 'word value'");
    }
    v[w[0]] = parse_number(w[1], line_no);
  });
  return SentimentLexicon(std::move(v));
}

const SentimentLexicon& SentimentLexicon::builtin() {
  static const SentimentLexicon lex = parse(data::sentiment_lexicon);
  return lex;
}

std::optional<double> SentimentLexicon::valence(const std::string& word) const {
  const auto it = valence_.find(word);
  if (it == valence_.end()) return std::nullopt;
  return it->second;
}

}  // namespace audiobook
