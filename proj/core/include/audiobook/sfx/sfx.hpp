#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "audiobook/audio/buffer.hpp"
#include "audiobook/script/types.hpp"

namespace audiobook {

// Every CueAudio leaves this module at this RMS level.
inline constexpr double kCueRmsDb = -23.0;

struct AssetEntry {
  std::string asset_id;
  std::string path;  // relative to the indexed directory
  std::vector<std::string> tags;
  double duration_s = 0.0;
  int sample_rate = 0;
  double loudness_rms = 0.0;  // dB RMS of the mono mixdown

  friend bool operator==(const AssetEntry&, const AssetEntry&) = default;
};

// Entries are kept sorted by asset_id.
struct AssetIndex {
  std::vector<AssetEntry> entries;

  const AssetEntry* find(const std::string& asset_id) const;
  friend bool operator==(const AssetIndex&, const AssetIndex&) = default;
};

struct IndexBuild {
  AssetIndex index;
  std::vector<std::string> warnings;
};

// Indexes `<id>.wav` files that have a `<id>.tags` sidecar holding
// comma-separated tags, stored sorted and deduplicated. WAVs without tags or that fail to decode are
// skipped with a warning. Throws std::runtime_error if `dir` cannot be read.
IndexBuild index_assets(const std::filesystem::path& dir, int threads = 1);

nlohmann::json index_to_json(const AssetIndex& index);
AssetIndex index_from_json(const nlohmann::json& j);
// Canonical text form; equal indexes give identical bytes.
std::string serialize_index(const AssetIndex& index);

// Asset length the cue is expected to fill when it gives no duration.
double default_duration(const std::string& event);
double cue_duration(const SoundCue& cue);

// Best tag overlap with the cue event (an explicit asset= reference wins
// outright); ties go to the smallest |asset duration - cue duration|, then
// to the lexicographically smallest id. nullopt when nothing overlaps.
std::optional<std::string> retrieve_asset(const SoundCue& cue, const AssetIndex& index);

enum class Provenance { kRetrieved, kProcedural, kExternal };

struct CueAudio {
  std::string cue_id;
  AudioBuffer buffer;  // mono, canonical rate
  Provenance provenance = Provenance::kProcedural;
  std::string asset_id;  // retrieved only
  std::uint64_t seed = 0;  // procedural only
};

class UnknownEventError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool has_recipe(const std::string& event);
const std::vector<std::string>& recipe_events();

// Deterministic noise-shaping recipes for rain, wind, thunder, footsteps,
// door, crowd and fire.
CueAudio synthesize_procedural(const std::string& event, double duration_s, std::uint64_t seed,
                               int rate = kCanonicalRate);

// Loads an indexed asset as a mono, canonical-rate, level-normalized cue.
CueAudio load_asset(const AssetEntry& entry, const std::filesystem::path& root,
                    int rate = kCanonicalRate);

// Scales to kCueRmsDb, pulls the peak under 0.99 if needed and applies
// 10 ms fades at both ends.
void finalize_cue_level(std::vector<double>& samples, int rate);

// Footstep recipe timing, shared with tests.
inline constexpr double kStepsPerSecond = 2.0;

}  // namespace audiobook
