#include <audiobook/audio/wav.hpp>
#include <audiobook/mixer/mixer.hpp>
#include <audiobook/sfx/sfx.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace audiobook;

namespace {

std::vector<double> samples(const CueAudio& c) { return {c.buffer.channel(0).begin(), c.buffer.channel(0).end()}; }

void write_asset(const std::filesystem::path& dir, const std::string& id, double seconds, const std::string& tags,
                 int rate = 48000) {
  write_wav(AudioBuffer::mono(rate, oracle::white_noise(static_cast<std::size_t>(seconds * rate), id.size(), 0.3)),
            dir / (id + ".wav"), WavFormat::kPcm16);
  if (!tags.empty()) std::ofstream(dir / (id + ".tags")) << tags << "\n";
}

AssetEntry entry(const std::string& id, std::vector<std::string> tags, double dur) {
  AssetEntry e;
  e.asset_id = id;
  e.path = id + ".wav";
  e.tags = std::move(tags);
  e.duration_s = dur;
  e.sample_rate = 48000;
  return e;
}

SoundCue cue(const std::string& event, std::optional<double> dur = std::nullopt) {
  SoundCue c;
  c.cue_id = "c";
  c.event = event;
  c.duration_s = dur;
  return c;
}

}  // namespace

TEST(IndexAssets, EmptyDirectory) {
  fixtures::TempDir dir("assets");
  const IndexBuild b = index_assets(dir.path());
  EXPECT_TRUE(b.index.entries.empty());
  EXPECT_TRUE(b.warnings.empty());
}

TEST(IndexAssets, TaggedFilesSortedAndUntaggedWarned) {
  fixtures::TempDir dir("assets");
  write_asset(dir.path(), "zeta", 0.5, "wind, gust");
  write_asset(dir.path(), "alpha", 1.0, "rain");
  write_asset(dir.path(), "mid", 0.25, "door,wood", 44100);
  write_asset(dir.path(), "orphan", 0.25, "");
  const IndexBuild b = index_assets(dir.path(), 2);
  ASSERT_EQ(b.index.entries.size(), 3u);
  EXPECT_EQ(b.index.entries[0].asset_id, "alpha");
  EXPECT_EQ(b.index.entries[1].asset_id, "mid");
  EXPECT_EQ(b.index.entries[2].asset_id, "zeta");
  EXPECT_EQ(b.index.entries[2].tags, (std::vector<std::string>{"gust", "wind"}));
  EXPECT_EQ(b.index.entries[1].sample_rate, 44100);
  EXPECT_NEAR(b.index.entries[0].duration_s, 1.0, 1e-9);
  ASSERT_EQ(b.warnings.size(), 1u);
  EXPECT_NE(b.warnings[0].find("orphan"), std::string::npos);
}

TEST(IndexAssets, ReindexIsByteIdentical) {
  fixtures::TempDir dir("assets");
  write_asset(dir.path(), "a", 0.3, "rain");
  write_asset(dir.path(), "b", 0.6, "thunder");
  const std::string first = serialize_index(index_assets(dir.path(), 1).index);
  const std::string second = serialize_index(index_assets(dir.path(), 4).index);
  EXPECT_EQ(first, second);
  EXPECT_EQ(index_from_json(nlohmann::json::parse(first)), index_assets(dir.path()).index);
}

TEST(IndexAssets, UnreadableDirectory) {
  EXPECT_THROW(index_assets("/nonexistent-asset-dir"), std::runtime_error);
}

TEST(Retrieve, SingleMatch) {
  AssetIndex idx;
  idx.entries = {entry("boom", {"thunder"}, 3.0), entry("drip", {"rain"}, 3.0)};
  EXPECT_EQ(retrieve_asset(cue("thunder"), idx), "boom");
}

TEST(Retrieve, NoOverlap) {
  AssetIndex idx;
  idx.entries = {entry("drip", {"rain"}, 3.0)};
  EXPECT_EQ(retrieve_asset(cue("thunder"), idx), std::nullopt);
}

TEST(Retrieve, DurationTieBreak) {
  AssetIndex idx;
  idx.entries = {entry("t_long", {"thunder"}, 9.0), entry("t_short", {"thunder"}, 2.0)};
  EXPECT_EQ(retrieve_asset(cue("thunder", 8.0), idx), "t_long");
  // Equal gaps fall to the smaller id.
  idx.entries = {entry("b", {"thunder"}, 6.0), entry("a", {"thunder"}, 2.0)};
  std::sort(idx.entries.begin(), idx.entries.end(), [](auto& x, auto& y) { return x.asset_id < y.asset_id; });
  EXPECT_EQ(retrieve_asset(cue("thunder", 4.0), idx), "a");
}

TEST(Retrieve, ExplicitAssetWins) {
  AssetIndex idx;
  idx.entries = {entry("creak", {"wood"}, 2.0), entry("slam", {"door"}, 2.0)};
  SoundCue c = cue("door");
  c.asset = "creak";
  EXPECT_EQ(retrieve_asset(c, idx), "creak");
  EXPECT_EQ(retrieve_asset(c, idx), retrieve_asset(c, idx));
}

TEST(Procedural, ZeroDurationRejected) {
  EXPECT_THROW(synthesize_procedural("rain", 0.0, 1), std::invalid_argument);
}

TEST(Procedural, UnknownEventRejected) {
  EXPECT_THROW(synthesize_procedural("kazoo", 1.0, 1), UnknownEventError);
}

TEST(Procedural, Deterministic) {
  const CueAudio a = synthesize_procedural("wind", 2.0, 42);
  const CueAudio b = synthesize_procedural("wind", 2.0, 42);
  EXPECT_EQ(a.buffer, b.buffer);
  EXPECT_NE(a.buffer, synthesize_procedural("wind", 2.0, 43).buffer);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_EQ(a.provenance, Provenance::kProcedural);
}

TEST(Procedural, ThunderIsLowFrequency) {
  const auto x = samples(synthesize_procedural("thunder", 3.0, 5));
  EXPECT_GE(oracle::band_energy_fraction(x, 48000, 4096, 0.0, 300.0), 0.8);
}

TEST(Procedural, RainIsHighFrequency) {
  const auto x = samples(synthesize_procedural("rain", 3.0, 5));
  EXPECT_GE(oracle::band_energy_fraction(x, 48000, 4096, 2000.0, 24000.0), 0.5);
}

TEST(Procedural, NeverClipsAndSitsAtCueLevel) {
  for (const auto& ev : recipe_events()) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const CueAudio c = synthesize_procedural(ev, 1.5 + 0.5 * static_cast<double>(seed), seed);
      EXPECT_LE(c.buffer.peak(), 1.0) << ev;
      EXPECT_EQ(c.buffer.channel_count(), 1u);
      EXPECT_EQ(c.buffer.sample_rate(), kCanonicalRate);
      // The 0.99 peak guard may pull a spiky recipe under the nominal level.
      EXPECT_LE(measure_loudness(c.buffer).rms_db, kCueRmsDb + 1e-9) << ev;
      EXPECT_GT(measure_loudness(c.buffer).rms_db, kCueRmsDb - 12.0) << ev;
    }
  }
}

TEST(Procedural, FootstepCount) {
  for (double dur : {1.0, 2.5, 3.0, 4.0}) {
    const auto x = samples(synthesize_procedural("footsteps", dur, 9));
    EXPECT_EQ(oracle::count_transients(x, 48000, 0.25), static_cast<std::size_t>(std::llround(dur * kStepsPerSecond))) << dur;
  }
}

TEST(LoadAsset, MonoCanonicalAndLevelled) {
  fixtures::TempDir dir("assets");
  write_wav(AudioBuffer(44100, {oracle::sine(300, 0.5, 1.0, 44100), oracle::sine(300, 0.1, 1.0, 44100)}),
            dir.path() / "hum.wav");
  std::ofstream(dir.path() / "hum.tags") << "hum\n";
  const IndexBuild b = index_assets(dir.path());
  ASSERT_EQ(b.index.entries.size(), 1u);
  const CueAudio c = load_asset(b.index.entries[0], dir.path());
  EXPECT_EQ(c.provenance, Provenance::kRetrieved);
  EXPECT_EQ(c.asset_id, "hum");
  EXPECT_EQ(c.buffer.channel_count(), 1u);
  EXPECT_EQ(c.buffer.sample_rate(), 48000);
  EXPECT_NEAR(static_cast<double>(c.buffer.frames()), 48000.0, 1.0);
  EXPECT_NEAR(measure_loudness(c.buffer).rms_db, kCueRmsDb, 0.1);
}
