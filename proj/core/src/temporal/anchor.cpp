#include "audiobook/temporal/anchor.hpp"

#include "audiobook/temporal/spectro.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace audiobook {

std::vector<CueOnset> anchor_cues(const std::vector<SegmentTiming>& timings, const std::vector<SoundCue>& cues,
                                  const DtwOptions& options) {
  std::map<std::size_t, const SegmentTiming*> by_segment;
  for (const auto& t : timings) by_segment[t.segment] = &t;
  // One warp per externally voiced segment, computed on first use.
  std::map<std::size_t, WarpPath> warps;

  std::vector<CueOnset> out;
  out.reserve(cues.size());
  for (const auto& cue : cues) {
    CueOnset onset;
    onset.cue_id = cue.cue_id;
    if (cue.anchor.time_s) {
      onset.onset_s = onset.planned_onset_s = *cue.anchor.time_s;
      out.push_back(onset);
      continue;
    }
    auto it = cue.anchor.segment >= 0 ? by_segment.find(static_cast<std::size_t>(cue.anchor.segment)) : by_segment.end();
    if (it == by_segment.end()) {
      throw std::out_of_range("cue '" + cue.cue_id + "' anchors to segment " + std::to_string(cue.anchor.segment) +
                              " which has no timing");
    }
    const SegmentTiming& seg = *it->second;
    double local = 0.0;
    if (cue.anchor.word) {
      const auto& entries = seg.planned.entries;
      if (*cue.anchor.word < 0 || static_cast<std::size_t>(*cue.anchor.word) >= entries.size()) {
        throw std::out_of_range("cue '" + cue.cue_id + "' anchors to word " + std::to_string(*cue.anchor.word) +
                                " of a " + std::to_string(entries.size()) + "-word segment");
      }
      const auto& e = entries[static_cast<std::size_t>(*cue.anchor.word)];
      local = e.onset_s + e.duration_s;
    }
    onset.planned_onset_s = seg.start_s + local;
    if (seg.planned_envelope && seg.realized_envelope) {
      auto w = warps.find(seg.segment);
      if (w == warps.end()) w = warps.emplace(seg.segment, dtw_align(*seg.planned_envelope, *seg.realized_envelope, options)).first;
      const double x = local / seg.planned_envelope->hop_s;
      local = warp_position(w->second, x) * seg.realized_envelope->hop_s;
      onset.dtw_cost = w->second.cost;
    }
    onset.onset_s = seg.start_s + local;
    out.push_back(onset);
  }
  return out;
}

double detect_onset(const AudioBuffer& stem, double w_s, double w_l, double threshold_db) {
  if (stem.empty()) throw std::invalid_argument("detect_onset: empty stem");
  const FeatureSeries f_s = energy_envelope(stem, kShortWindowS, kShortWindowS, false, -200.0);
  const FeatureSeries f_l = energy_envelope(stem, kLongWindowS, kLongWindowS, false, -200.0);
  FeatureSeries env = multiscale_integrate(f_s, f_l, w_s, w_l);
  const double top = *std::max_element(env.values.begin(), env.values.end());
  const double level = top + threshold_db;
  if (env.values.front() >= level) return 0.0;
  for (std::size_t k = 1; k < env.values.size(); ++k) {
    if (env.values[k] >= level) {
      const double u = (level - env.values[k - 1]) / (env.values[k] - env.values[k - 1]);
      return (static_cast<double>(k - 1) + u) * env.hop_s;
    }
  }
  return 0.0;
}

}  // namespace audiobook
