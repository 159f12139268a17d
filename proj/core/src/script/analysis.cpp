#include "audiobook/script/analysis.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "audiobook/script/text.hpp"

namespace audiobook {
namespace {

constexpr int kLookBehind = 4;
constexpr int kLookAhead = 8;
constexpr double kProseConfidence = 0.5;

bool phrase_at(const std::vector<Word>& words, std::size_t at, const std::vector<std::string>& phrase) {
  if (at + phrase.size() > words.size()) return false;
  for (std::size_t k = 0; k < phrase.size(); ++k) {
    if (words[at + k].norm != phrase[k]) return false;
  }
  return true;
}

// Nearest phrase match to `trigger` whose words all sit inside
// [sentence_begin, sentence_end) and whose start is within the look window.
template <typename Rule>
const Rule* nearest_rule(const std::vector<Word>& words, const std::vector<Rule>& rules,
                         std::size_t trigger, std::size_t sentence_begin, std::size_t sentence_end) {
  const Rule* best = nullptr;
  long best_dist = 0;
  std::size_t best_pos = 0;
  const long lo = std::max<long>(static_cast<long>(sentence_begin), static_cast<long>(trigger) - kLookBehind);
  const long hi = std::min<long>(static_cast<long>(sentence_end) - 1, static_cast<long>(trigger) + kLookAhead);
  for (long pos = lo; pos <= hi; ++pos) {
    if (pos == static_cast<long>(trigger)) continue;
    for (const Rule& r : rules) {
      const auto p = static_cast<std::size_t>(pos);
      if (p + r.phrase.size() > sentence_end || !phrase_at(words, p, r.phrase)) continue;
      const long dist = std::labs(pos - static_cast<long>(trigger));
      // Closer wins; at equal distance the earlier position, then the longer phrase.
      const bool better = best == nullptr || dist < best_dist ||
                          (dist == best_dist && p < best_pos) ||
                          (dist == best_dist && p == best_pos && r.phrase.size() > best->phrase.size());
      if (better) {
        best = &r;
        best_dist = dist;
        best_pos = p;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<SoundCue> extract_cues_prose(const ScriptDoc& doc, const CueLexicon& lexicon) {
  std::vector<SoundCue> out;
  for (const Segment& seg : doc.segments) {
    std::set<std::string> tagged_events;
    std::set<int> tagged_words;
    for (const SoundCue& c : doc.cues) {
      if (c.anchor.segment != seg.index) continue;
      tagged_events.insert(c.event);
      if (c.anchor.word) tagged_words.insert(*c.anchor.word);
    }
    const auto words = tokenize_words(seg.text);
    std::size_t sentence_begin = 0;
    while (sentence_begin < words.size()) {
      std::size_t sentence_end = sentence_begin;
      while (sentence_end < words.size() && !ends_sentence(words[sentence_end].raw)) ++sentence_end;
      sentence_end = std::min(words.size(), sentence_end + 1);
      std::set<std::string> fired;
      for (std::size_t w = sentence_begin; w < sentence_end; ++w) {
        const auto event = lexicon.event_for(words[w].norm);
        if (!event || fired.contains(*event)) continue;
        fired.insert(*event);
        if (tagged_events.contains(*event) || tagged_words.contains(static_cast<int>(w))) continue;
        SoundCue c;
        c.cue_id = "p" + std::to_string(seg.index) + "_" + std::to_string(w);
        c.event = *event;
        c.anchor.segment = seg.index;
        c.anchor.word = static_cast<int>(w);
        c.spatial.environment = doc.environment;
        c.spatial.distance = lexicon.default_distance();
        c.confidence = kProseConfidence;
        if (const auto* dir = nearest_rule(words, lexicon.directions(), w, sentence_begin, sentence_end)) {
          c.spatial.azimuth = dir->azimuth;
        }
        if (const auto* dist = nearest_rule(words, lexicon.distances(), w, sentence_begin, sentence_end)) {
          c.spatial.distance = lexicon.tier_distance(dist->tier);
        }
        out.push_back(std::move(c));
      }
      sentence_begin = sentence_end;
    }
  }
  return out;
}

double sentiment_score(const Segment& segment, const SentimentLexicon& lexicon) {
  double sum = 0.0;
  int hits = 0;
  for (const Word& w : tokenize_words(segment.text)) {
    if (const auto v = lexicon.valence(w.norm)) {
      sum += *v;
      ++hits;
    }
  }
  if (hits == 0) return 0.0;
  return std::clamp(sum / hits, -1.0, 1.0);
}

}  // namespace audiobook
