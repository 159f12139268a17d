#include "audiobook/orchestrator/plan.hpp"

#include <cmath>

#include "audiobook/script/analysis.hpp"
#include "audiobook/script/json.hpp"
#include "audiobook/temporal/anchor.hpp"
#include "audiobook/temporal/lstm.hpp"
#include "audiobook/util/rng.hpp"

namespace audiobook {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kRetrieved: return "retrieved";
    case Provenance::kProcedural: return "procedural";
    case Provenance::kExternal: return "external";
  }
  return "procedural";
}

RenderPlan plan(const ScriptDoc& doc, const AssetIndex& index, const ProjectConfig& config) {
  RenderPlan rp;
  rp.doc = doc;
  rp.seed = config.seed;
  for (auto& seg : rp.doc.segments) seg.sentiment = sentiment_score(seg);
  if (config.prose_cues) {
    for (auto& cue : extract_cues_prose(rp.doc)) rp.doc.cues.push_back(std::move(cue));
  }

  const auto scores = transition_scores(rp.doc);
  std::vector<SegmentTiming> timings;
  double t = kLeadInS;
  for (std::size_t i = 0; i < rp.doc.segments.size(); ++i) {
    const Segment& seg = rp.doc.segments[i];
    auto voice = rp.doc.voices.find(seg.voice_id);
    if (voice == rp.doc.voices.end()) throw PlanError("segment " + std::to_string(i) + " uses unknown voice '" + seg.voice_id + "'");
    SegmentPlan sp;
    sp.index = seg.index;
    sp.voice_id = seg.voice_id;
    sp.sentiment = seg.sentiment;
    sp.prosody = apply_prosody(seg.sentiment);
    sp.transition_score = scores[i];
    sp.pause_before_s = i == 0 ? 0.0 : transition_pause_s(scores[i]);
    t += sp.pause_before_s;
    sp.start_s = t;
    // Frame-accurate, matching the synthesized buffer.
    sp.duration_s = std::ceil(planned_duration_s(seg, voice->second, sp.prosody) * kCanonicalRate) / kCanonicalRate;
    t += sp.duration_s;
    SegmentTiming timing;
    timing.segment = i;
    timing.start_s = sp.start_s;
    timing.planned = plan_transcript(seg, voice->second, sp.prosody);
    timings.push_back(std::move(timing));
    rp.segments.push_back(sp);
  }
  rp.duration_s = t + kTailS;

  std::vector<CueOnset> onsets;
  try {
    onsets = anchor_cues(timings, rp.doc.cues);
  } catch (const std::out_of_range& e) {
    throw PlanError(e.what());
  }
  for (std::size_t k = 0; k < rp.doc.cues.size(); ++k) {
    const SoundCue& cue = rp.doc.cues[k];
    CuePlan cp;
    cp.cue_id = cue.cue_id;
    cp.event = cue.event;
    cp.spatial = cue.spatial;
    cp.planned_onset_s = onsets[k].onset_s;
    std::optional<std::string> asset;
    if (cue.source != CueSource::kProcedural) asset = retrieve_asset(cue, index);
    if (cue.asset && (!asset || *asset != *cue.asset)) {
      rp.warnings.push_back("cue '" + cue.cue_id + "': asset '" + *cue.asset + "' is not in the index");
    }
    if (asset) {
      cp.resolution = Provenance::kRetrieved;
      cp.asset_id = *asset;
      cp.duration_s = index.find(*asset)->duration_s;
    } else if (cue.source != CueSource::kRetrieved && has_recipe(cue.event)) {
      cp.resolution = Provenance::kProcedural;
      cp.seed = derive_seed(config.seed, cue.cue_id);
      cp.duration_s = cue_duration(cue);
    } else {
      throw PlanError("cue '" + cue.cue_id + "' (" + cue.event + "): no matching asset" +
                      (cue.source == CueSource::kRetrieved ? " and src=retrieved" : " and no procedural recipe"));
    }
    rp.cues.push_back(std::move(cp));
  }
  return rp;
}

nlohmann::json plan_to_json(const RenderPlan& rp) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : rp.segments) {
    segments.push_back({{"index", s.index},
                        {"voice_id", s.voice_id},
                        {"sentiment", s.sentiment},
                        {"prosody",
                         {{"pitch_scale", s.prosody.pitch_scale},
                          {"rate_scale", s.prosody.rate_scale},
                          {"intensity_scale", s.prosody.intensity_scale}}},
                        {"transition_score", s.transition_score},
                        {"pause_before_s", s.pause_before_s},
                        {"start_s", s.start_s},
                        {"duration_s", s.duration_s}});
  }
  nlohmann::json cues = nlohmann::json::array();
  for (const auto& c : rp.cues) {
    nlohmann::json j = {{"cue_id", c.cue_id},
                        {"event", c.event},
                        {"resolution", to_string(c.resolution)},
                        {"duration_s", c.duration_s},
                        {"planned_onset_s", c.planned_onset_s},
                        {"spatial", c.spatial}};
    if (c.resolution == Provenance::kRetrieved) {
      j["asset_id"] = c.asset_id;
    } else {
      j["seed"] = c.seed;
    }
    cues.push_back(std::move(j));
  }
  return {{"title", rp.doc.title},
          {"seed", rp.seed},
          {"duration_s", rp.duration_s},
          {"segments", segments},
          {"cues", cues},
          {"warnings", rp.warnings}};
}

}  // namespace audiobook
