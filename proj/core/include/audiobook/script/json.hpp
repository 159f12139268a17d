#pragma once

#include <nlohmann/json.hpp>

#include "audiobook/script/types.hpp"

namespace audiobook {

void to_json(nlohmann::json& j, const VoiceProfile& v);
void from_json(const nlohmann::json& j, VoiceProfile& v);
void to_json(nlohmann::json& j, const Segment& s);
void from_json(const nlohmann::json& j, Segment& s);
void to_json(nlohmann::json& j, const TrajectoryKey& k);
void from_json(const nlohmann::json& j, TrajectoryKey& k);
void to_json(nlohmann::json& j, const SpatialSpec& s);
void from_json(const nlohmann::json& j, SpatialSpec& s);
void to_json(nlohmann::json& j, const CueAnchor& a);
void from_json(const nlohmann::json& j, CueAnchor& a);
void to_json(nlohmann::json& j, const SoundCue& c);
void from_json(const nlohmann::json& j, SoundCue& c);
void to_json(nlohmann::json& j, const ScriptDoc& d);
void from_json(const nlohmann::json& j, ScriptDoc& d);

}  // namespace audiobook
