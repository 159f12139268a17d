// Test narrator speaking the built-in voice `factor` times slower.
//
//   stretch_narrator <factor>
//
// Reads an adapter request on stdin, synthesizes the text with the
// built-in engine and writes the samples with a header rate divided by
// `factor`, so the pipeline hears everything stretched in time. Word
// timestamps are scaled to match.

#include <audiobook/audio/wav.hpp>
#include <audiobook/tts/synth.hpp>
#include <audiobook/util/rng.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <string>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: stretch_narrator <factor>\n";
    return 2;
  }
  try {
    const double factor = std::stod(argv[1]);
    const std::string input{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    const auto req = nlohmann::json::parse(input);

    audiobook::Segment seg;
    seg.text = req.at("text").get<std::string>();
    audiobook::VoiceProfile voice;
    voice.voice_id = req.at("voice_id").get<std::string>();
    voice.base_pitch = req.at("pitch_hz").get<double>();
    voice.rate = req.at("rate_wpm").get<double>();
    voice.timbre_seed = req.at("seed").get<std::int64_t>();

    const audiobook::Narration n = audiobook::synthesize_segment(seg, voice);
    const int slow_rate = static_cast<int>(std::lround(n.audio.sample_rate() / factor));
    if (std::fabs(n.audio.sample_rate() / static_cast<double>(slow_rate) - factor) > 1e-12) {
      std::cerr << "stretch_narrator: factor must divide the sample rate exactly\n";
      return 2;
    }
    const audiobook::AudioBuffer slow(slow_rate, n.audio.channels());

    const std::filesystem::path rel =
        std::filesystem::path("tts_cache") / (std::to_string(audiobook::fnv1a(input)) + ".wav");
    std::filesystem::create_directories(rel.parent_path());
    audiobook::write_wav(slow, rel, audiobook::WavFormat::kFloat32);

    nlohmann::json words = nlohmann::json::array();
    for (const auto& e : n.transcript.entries)
      words.push_back({{"w", e.word}, {"onset_s", e.onset_s * factor}, {"dur_s", e.duration_s * factor}});
    std::cout << nlohmann::json{{"wav_path", rel.string()}, {"words", words}}.dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "stretch_narrator: " << e.what() << "\n";
    return 1;
  }
}
