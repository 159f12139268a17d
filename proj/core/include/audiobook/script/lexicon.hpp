#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace audiobook {

// Keyword rules for turning prose into sound cues. Text format, one rule
// per line (see core/data/cue_lexicon.txt):
//   tier <name> <meters>
//   event <event> <trigger words...>
//   direction <azimuth_deg> <phrase words...>
//   distance <tier> <phrase words...>
class CueLexicon {
 public:
  struct DirectionRule {
    std::vector<std::string> phrase;
    double azimuth;
  };
  struct DistanceRule {
    std::vector<std::string> phrase;
    std::string tier;
  };

  static CueLexicon parse(std::string_view text);
  static const CueLexicon& builtin();

  std::optional<std::string> event_for(const std::string& word) const;
  bool is_event(const std::string& event) const { return events_.contains(event); }
  const std::set<std::string>& events() const { return events_; }
  const std::vector<DirectionRule>& directions() const { return directions_; }
  const std::vector<DistanceRule>& distances() const { return distances_; }
  double tier_distance(const std::string& tier) const;
  double default_distance() const { return tier_distance("mid"); }

 private:
  std::map<std::string, std::string> triggers_;
  std::set<std::string> events_;
  std::vector<DirectionRule> directions_;
  std::vector<DistanceRule> distances_;
  std::map<std::string, double> tiers_;
};

// Word valence table, "word value" per line.
class SentimentLexicon {
 public:
  static SentimentLexicon parse(std::string_view text);
  static const SentimentLexicon& builtin();
  explicit SentimentLexicon(std::map<std::string, double> valence);

  std::optional<double> valence(const std::string& word) const;
  std::size_t size() const { return valence_.size(); }

 private:
  SentimentLexicon() = default;
  std::map<std::string, double> valence_;
};

}  // namespace audiobook
