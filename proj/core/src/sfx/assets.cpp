#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "audiobook/audio/resample.hpp"
#include "audiobook/audio/wav.hpp"
#include "audiobook/sfx/sfx.hpp"
#include "audiobook/util/parallel.hpp"

namespace audiobook {
namespace {

std::vector<std::string> read_tags(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  std::vector<std::string> tags;
  std::string item;
  std::istringstream items(ss.str());
  while (std::getline(items, item, ',')) {
    std::string t;
    for (char c : item) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    if (!t.empty()) tags.push_back(t);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  return tags;
}

double rms_db(const std::vector<double>& x) {
  double e = 0.0;
  for (double s : x) e += s * s;
  const double rms = x.empty() ? 0.0 : std::sqrt(e / static_cast<double>(x.size()));
  return rms > 1e-6 ? 20.0 * std::log10(rms) : -120.0;
}

}  // namespace

const AssetEntry* AssetIndex::find(const std::string& asset_id) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), asset_id,
                                   [](const AssetEntry& e, const std::string& id) { return e.asset_id < id; });
  return it != entries.end() && it->asset_id == asset_id ? &*it : nullptr;
}

IndexBuild index_assets(const std::filesystem::path& dir, int threads) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw std::runtime_error("asset directory " + dir.string() + " is not readable");
  }
  std::vector<std::filesystem::path> wavs;
  for (std::filesystem::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".wav") wavs.push_back(it->path());
  }
  if (ec) throw std::runtime_error("cannot list asset directory " + dir.string() + ": " + ec.message());
  std::sort(wavs.begin(), wavs.end());

  std::vector<std::optional<AssetEntry>> slots(wavs.size());
  std::vector<std::string> problems(wavs.size());
  parallel_for(wavs.size(), threads, [&](std::size_t i) {
    const auto& wav = wavs[i];
    auto tags_path = wav;
    tags_path.replace_extension(".tags");
    if (!std::filesystem::exists(tags_path)) {
      problems[i] = wav.filename().string() + ": no .tags sidecar, skipped";
      return;
    }
    try {
      const AudioBuffer buf = read_wav(wav);
      if (buf.frames() == 0) {
        problems[i] = wav.filename().string() + ": no audio frames, skipped";
        return;
      }
      AssetEntry e;
      e.asset_id = wav.stem().string();
      e.path = wav.filename().string();
      e.tags = read_tags(tags_path);
      e.duration_s = buf.duration_s();
      e.sample_rate = buf.sample_rate();
      e.loudness_rms = rms_db(mixdown_mono(buf).channels()[0]);
      slots[i] = std::move(e);
    } catch (const WavError& err) {
      problems[i] = wav.filename().string() + ": " + err.what() + ", skipped";
    }
  });
  IndexBuild out;
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    if (slots[i]) out.index.entries.push_back(std::move(*slots[i]));
    if (!problems[i].empty()) out.warnings.push_back(problems[i]);
  }
  return out;
}

nlohmann::json index_to_json(const AssetIndex& index) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : index.entries) {
    entries.push_back({{"asset_id", e.asset_id},
                       {"path", e.path},
                       {"tags", e.tags},
                       {"duration_s", e.duration_s},
                       {"sample_rate", e.sample_rate},
                       {"loudness_rms", e.loudness_rms}});
  }
  return {{"entries", entries}};
}

AssetIndex index_from_json(const nlohmann::json& j) {
  AssetIndex index;
  for (const auto& e : j.at("entries")) {
    AssetEntry a;
    e.at("asset_id").get_to(a.asset_id);
    e.at("path").get_to(a.path);
    e.at("tags").get_to(a.tags);
    e.at("duration_s").get_to(a.duration_s);
    e.at("sample_rate").get_to(a.sample_rate);
    e.at("loudness_rms").get_to(a.loudness_rms);
    if (!(a.duration_s > 0.0)) throw std::invalid_argument("asset " + a.asset_id + " has non-positive duration");
    index.entries.push_back(std::move(a));
  }
  std::sort(index.entries.begin(), index.entries.end(),
            [](const AssetEntry& a, const AssetEntry& b) { return a.asset_id < b.asset_id; });
  for (std::size_t i = 1; i < index.entries.size(); ++i) {
    if (index.entries[i].asset_id == index.entries[i - 1].asset_id) {
      throw std::invalid_argument("duplicate asset id " + index.entries[i].asset_id);
    }
  }
  return index;
}

std::string serialize_index(const AssetIndex& index) { return index_to_json(index).dump(2) + "\n"; }

double default_duration(const std::string& event) {
  static const std::map<std::string, double> d = {{"thunder", 4.0}, {"rain", 8.0},  {"wind", 6.0},
                                                  {"footsteps", 3.0}, {"door", 2.0}, {"crowd", 6.0},
                                                  {"fire", 6.0}};
  const auto it = d.find(event);
  return it == d.end() ? 3.0 : it->second;
}

double cue_duration(const SoundCue& cue) {
  return cue.duration_s ? *cue.duration_s : default_duration(cue.event);
}

std::optional<std::string> retrieve_asset(const SoundCue& cue, const AssetIndex& index) {
  if (cue.asset) {
    if (index.find(*cue.asset)) return *cue.asset;
  }
  const double want = cue_duration(cue);
  const AssetEntry* best = nullptr;
  int best_overlap = 0;
  double best_gap = 0.0;
  for (const auto& e : index.entries) {
    const int overlap = static_cast<int>(std::count(e.tags.begin(), e.tags.end(), cue.event));
    if (overlap == 0) continue;
    const double gap = std::abs(e.duration_s - want);
    // Entries are iterated in id order, so strict comparisons keep the
    // smallest id on a full tie.
    if (best == nullptr || overlap > best_overlap || (overlap == best_overlap && gap < best_gap)) {
      best = &e;
      best_overlap = overlap;
      best_gap = gap;
    }
  }
  if (!best) return std::nullopt;
  return best->asset_id;
}

void finalize_cue_level(std::vector<double>& x, int rate) {
  if (x.empty()) return;
  double e = 0.0;
  for (double s : x) e += s * s;
  const double rms = std::sqrt(e / static_cast<double>(x.size()));
  if (rms > 0.0) {
    const double g = std::pow(10.0, kCueRmsDb / 20.0) / rms;
    for (double& s : x) s *= g;
  }
  double peak = 0.0;
  for (double s : x) peak = std::max(peak, std::abs(s));
  if (peak > 0.99) {
    const double g = 0.99 / peak;
    for (double& s : x) s *= g;
  }
  const auto fade = std::min(x.size() / 2, static_cast<std::size_t>(0.010 * rate));
  for (std::size_t i = 0; i < fade; ++i) {
    const double g = static_cast<double>(i) / static_cast<double>(fade);
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

CueAudio load_asset(const AssetEntry& entry, const std::filesystem::path& root, int rate) {
  const AudioBuffer raw = read_wav(root / entry.path);
  AudioBuffer mono = resample(mixdown_mono(raw), rate);
  std::vector<double> x(mono.channel(0).begin(), mono.channel(0).end());
  finalize_cue_level(x, rate);
  CueAudio c;
  c.buffer = AudioBuffer::mono(rate, std::move(x));
  c.provenance = Provenance::kRetrieved;
  c.asset_id = entry.asset_id;
  return c;
}

}  // namespace audiobook
