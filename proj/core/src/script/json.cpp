#include "audiobook/script/json.hpp"

#include <stdexcept>

namespace audiobook {

using nlohmann::json;

void to_json(json& j, const VoiceProfile& v) {
  j = json{{"voice_id", v.voice_id}, {"base_pitch", v.base_pitch}, {"rate", v.rate},
           {"timbre_seed", v.timbre_seed}};
}

void from_json(const json& j, VoiceProfile& v) {
  j.at("voice_id").get_to(v.voice_id);
  j.at("base_pitch").get_to(v.base_pitch);
  j.at("rate").get_to(v.rate);
  v.timbre_seed = j.value("timbre_seed", std::int64_t{0});
}

void to_json(json& j, const Segment& s) {
  j = json{{"index", s.index}, {"kind", to_string(s.kind)}, {"voice_id", s.voice_id},
           {"text", s.text}, {"sentiment", s.sentiment}};
}

void from_json(const json& j, Segment& s) {
  j.at("index").get_to(s.index);
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "narration" && kind != "dialogue") throw std::invalid_argument("segment kind '" + kind + "'");
  s.kind = kind == "dialogue" ? SegmentKind::kDialogue : SegmentKind::kNarration;
  j.at("voice_id").get_to(s.voice_id);
  j.at("text").get_to(s.text);
  s.sentiment = j.value("sentiment", 0.0);
}

void to_json(json& j, const TrajectoryKey& k) {
  j = json{{"time_s", k.time_s}, {"azimuth", k.azimuth}, {"elevation", k.elevation},
           {"distance", k.distance}};
}

void from_json(const json& j, TrajectoryKey& k) {
  j.at("time_s").get_to(k.time_s);
  j.at("azimuth").get_to(k.azimuth);
  j.at("elevation").get_to(k.elevation);
  j.at("distance").get_to(k.distance);
}

void to_json(json& j, const SpatialSpec& s) {
  j = json{{"azimuth", s.azimuth}, {"elevation", s.elevation}, {"distance", s.distance},
           {"trajectory", s.trajectory}, {"environment", s.environment}};
}

void from_json(const json& j, SpatialSpec& s) {
  j.at("azimuth").get_to(s.azimuth);
  j.at("elevation").get_to(s.elevation);
  j.at("distance").get_to(s.distance);
  s.trajectory = j.value("trajectory", std::vector<TrajectoryKey>{});
  j.at("environment").get_to(s.environment);
}

void to_json(json& j, const CueAnchor& a) {
  j = json{{"segment", a.segment}};
  if (a.word) j["word"] = *a.word;
  if (a.time_s) j["time_s"] = *a.time_s;
}

void from_json(const json& j, CueAnchor& a) {
  j.at("segment").get_to(a.segment);
  a.word.reset();
  a.time_s.reset();
  if (j.contains("word")) a.word = j.at("word").get<int>();
  if (j.contains("time_s")) a.time_s = j.at("time_s").get<double>();
}

void to_json(json& j, const SoundCue& c) {
  j = json{{"cue_id", c.cue_id},   {"event", c.event},
           {"anchor", c.anchor},   {"spatial", c.spatial},
           {"duration_s", nullptr}, {"source", to_string(c.source)},
           {"asset", nullptr},     {"confidence", c.confidence}};
  if (c.duration_s) j["duration_s"] = *c.duration_s;
  if (c.asset) j["asset"] = *c.asset;
}

void from_json(const json& j, SoundCue& c) {
  j.at("cue_id").get_to(c.cue_id);
  j.at("event").get_to(c.event);
  j.at("anchor").get_to(c.anchor);
  j.at("spatial").get_to(c.spatial);
  c.duration_s.reset();
  c.asset.reset();
  if (j.contains("duration_s") && !j["duration_s"].is_null()) c.duration_s = j["duration_s"].get<double>();
  if (j.contains("asset") && !j["asset"].is_null()) c.asset = j["asset"].get<std::string>();
  const auto src = parse_cue_source(j.value("source", std::string("auto")));
  if (!src) throw std::invalid_argument("cue source must be auto, retrieved or procedural");
  c.source = *src;
  c.confidence = j.value("confidence", 1.0);
}

void to_json(json& j, const ScriptDoc& d) {
  j = json{{"title", d.title}, {"environment", d.environment}, {"voices", d.voices},
           {"segments", d.segments}, {"cues", d.cues}};
}

void from_json(const json& j, ScriptDoc& d) {
  d.title = j.value("title", std::string());
  d.environment = j.value("environment", std::string("room"));
  d.voices = j.at("voices").get<std::map<std::string, VoiceProfile>>();
  d.segments = j.at("segments").get<std::vector<Segment>>();
  d.cues = j.value("cues", std::vector<SoundCue>{});
}

}  // namespace audiobook
