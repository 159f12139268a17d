#include "audiobook/orchestrator/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "audiobook/audio/wav.hpp"
#include "audiobook/script/parser.hpp"
#include "audiobook/sfx/sfx.hpp"
#include "audiobook/spatial/environment.hpp"
#include "audiobook/spatial/render.hpp"
#include "audiobook/temporal/spectro.hpp"
#include "audiobook/tts/adapter.hpp"
#include "audiobook/util/parallel.hpp"
#include "audiobook/util/rng.hpp"

namespace audiobook {
namespace {

constexpr int kRate = kCanonicalRate;

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::uint64_t hash_audio(const AudioBuffer& buf) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& ch : buf.channels()) {
    h = fnv1a(std::string_view(reinterpret_cast<const char*>(ch.data()), ch.size() * sizeof(double)), h);
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

AudioBuffer scaled(const AudioBuffer& buf, double gain) {
  AudioBuffer out = buf;
  if (gain == 1.0) return out;
  for (std::size_t c = 0; c < out.channel_count(); ++c) {
    for (double& v : out.channel(c)) v *= gain;
  }
  return out;
}

AudioBuffer with_automation(const AudioBuffer& stem, const std::vector<GainKey>& keys) {
  AudioBuffer out = stem;
  for (std::size_t i = 0; i < out.frames(); ++i) {
    const double g = automation_gain(keys, static_cast<double>(i) / out.sample_rate());
    for (std::size_t c = 0; c < out.channel_count(); ++c) out.channel(c)[i] *= g;
  }
  return out;
}

AudioBuffer slice_mono(const AudioBuffer& mono, std::size_t start, std::size_t frames) {
  std::vector<double> out(frames, 0.0);
  auto ch = mono.channel(0);
  for (std::size_t i = 0; i < frames && start + i < ch.size(); ++i) out[i] = ch[start + i];
  return AudioBuffer::mono(mono.sample_rate(), std::move(out));
}

AudioBuffer am_probe(double f_c, double f_m, double depth, double seconds, double rms_db) {
  const auto n = static_cast<std::size_t>(seconds * kRate);
  std::vector<double> x(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kRate;
    x[i] = (1.0 + depth * std::sin(2 * std::numbers::pi * f_m * t)) * std::sin(2 * std::numbers::pi * f_c * t);
    acc += x[i] * x[i];
  }
  const double g = db_to_gain(rms_db) / std::sqrt(acc / static_cast<double>(n));
  for (double& v : x) v *= g;
  return AudioBuffer::mono(kRate, std::move(x));
}

// Same chain as master(): profile, normalization gain, limiter.
AudioBuffer through_master_chain(const AudioBuffer& mono, PlaybackMode profile, double gain, double ceiling_db) {
  auto ch = mono.channel(0);
  std::vector<double> m(ch.begin(), ch.end());
  AudioBuffer stereo(mono.sample_rate(), {m, m});
  return limit(scaled(apply_profile(stereo, profile), gain), ceiling_db);
}

struct Measurement {
  QualityReport report;
  AudioBuffer master;
};

}  // namespace

nlohmann::json mix_plan_to_json(const MixPlan& mix) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : mix.layers) {
    nlohmann::json keys = nlohmann::json::array();
    for (const auto& k : l.automation) keys.push_back({{"time_s", k.time_s}, {"gain", k.gain}});
    layers.push_back({{"cue_id", l.cue_id}, {"onset_s", l.onset_s}, {"automation", keys}});
  }
  return {{"narration_gain", mix.narration_gain},
          {"profile", to_string(mix.profile)},
          {"targets",
           {{"narration_rms_db", mix.targets.narration_rms_db},
            {"bed_rms_db", mix.targets.bed_rms_db},
            {"ceiling_db", mix.targets.ceiling_db}}},
          {"layers", layers}};
}

RenderOutcome render_document(const ScriptDoc& doc, const AssetIndex& index, const std::filesystem::path& asset_root,
                              const ProjectConfig& config, const RenderOptions& options) {
  stage("validate", [&] {
    config.validate();
    const auto diags = validate(doc);
    if (!diags.empty()) {
      std::string msg;
      for (const auto& d : diags) msg += (msg.empty() ? "" : "; ") + format(d);
      throw std::invalid_argument(msg);
    }
    return 0;
  });
  const int threads = std::max(1, options.threads);
  RenderOutcome out;
  MessageLog log;
  const auto env_table = stage("plan", [&] { return EnvironmentTable::builtin().with_overrides(config.environment_overrides); });

  // Planning.
  const int m_plan_req = log.post("orchestrator", "planner", MessageKind::kRequest, 1, {},
                                  {{"schema", "request.plan/1"},
                                   {"segments", doc.segments.size()},
                                   {"tagged_cues", doc.cues.size()},
                                   {"seed", config.seed}});
  out.plan = stage("plan", [&] { return plan(doc, index, config); });
  for (const auto& c : out.plan.cues) {
    if (!env_table.contains(c.spatial.environment)) {
      throw StageError("plan", "cue '" + c.cue_id + "' uses unknown environment '" + c.spatial.environment + "'");
    }
  }
  std::vector<std::string> warnings = out.plan.warnings;
  {
    nlohmann::json res = nlohmann::json::array();
    for (const auto& c : out.plan.cues) res.push_back({{"cue_id", c.cue_id}, {"resolution", to_string(c.resolution)}});
    log.post("planner", "orchestrator", MessageKind::kResult, 1, {m_plan_req},
             {{"schema", "result.plan/1"}, {"cues", res}, {"duration_s", out.plan.duration_s}});
  }
  const int m_plan = static_cast<int>(log.messages().size());
  const ScriptDoc& full = out.plan.doc;
  const std::size_t n_seg = full.segments.size();

  // Narration, one task per segment.
  const int m_narr_req = log.post("orchestrator", "narrator", MessageKind::kRequest, 1, {m_plan},
                                  {{"schema", "request.narration/1"},
                                   {"segments", n_seg},
                                   {"external", config.tts.configured()}});
  std::vector<NarrationOutcome> narrations(n_seg);
  std::vector<std::optional<AudioBuffer>> planned_audio(n_seg);
  ProcessLimiter limiter(config.tts.max_processes);
  stage("narrate", [&] {
    parallel_for(n_seg, threads, [&](std::size_t i) {
      const Segment& seg = full.segments[i];
      const VoiceProfile& voice = full.voices.at(seg.voice_id);
      const ProsodyParams& prosody = out.plan.segments[i].prosody;
      narrations[i] = narrate(seg, voice, prosody, config.tts.configured() ? &config.tts : nullptr, kRate, &limiter);
      if (narrations[i].external) planned_audio[i] = synthesize_segment(seg, voice, prosody, kRate).audio;
    });
    return 0;
  });
  std::vector<TimedTranscript> planned_transcripts(n_seg);
  for (std::size_t i = 0; i < n_seg; ++i) {
    for (const auto& w : narrations[i].warnings) warnings.push_back("segment " + std::to_string(i) + ": " + w);
    const Segment& seg = full.segments[i];
    planned_transcripts[i] = plan_transcript(seg, full.voices.at(seg.voice_id), out.plan.segments[i].prosody);
  }

  // Realized timeline.
  double t = kLeadInS;
  std::vector<std::size_t> seg_start_frame(n_seg);
  for (std::size_t i = 0; i < n_seg; ++i) {
    t += out.plan.segments[i].pause_before_s;
    seg_start_frame[i] = static_cast<std::size_t>(std::llround(t * kRate));
    out.segment_starts.push_back(static_cast<double>(seg_start_frame[i]) / kRate);
    out.external_segments.push_back(narrations[i].external);
    t = out.segment_starts[i] + narrations[i].narration.audio.duration_s();
  }
  const auto total_frames = static_cast<std::size_t>(std::llround((t + kTailS) * kRate));
  {
    std::vector<double> narr(total_frames, 0.0);
    for (std::size_t i = 0; i < n_seg; ++i) {
      auto src = narrations[i].narration.audio.channel(0);
      std::copy(src.begin(), src.end(), narr.begin() + static_cast<std::ptrdiff_t>(seg_start_frame[i]));
    }
    out.narration = AudioBuffer::mono(kRate, std::move(narr));
  }
  {
    nlohmann::json segs = nlohmann::json::array();
    for (std::size_t i = 0; i < n_seg; ++i) {
      segs.push_back({{"index", i},
                      {"external", narrations[i].external},
                      {"start_s", out.segment_starts[i]},
                      {"duration_s", narrations[i].narration.audio.duration_s()}});
    }
    log.post("narrator", "orchestrator", MessageKind::kResult, 1, {m_narr_req},
             {{"schema", "result.narration/1"}, {"segments", segs}, {"warnings", warnings}});
  }
  const int m_narr = static_cast<int>(log.messages().size());

  // Anchoring on the realized timeline.
  const int m_anchor_req = log.post("orchestrator", "temporal", MessageKind::kRequest, 1, {m_narr},
                                    {{"schema", "request.anchor/1"}, {"cues", full.cues.size()}});
  std::vector<SegmentTiming> timings(n_seg);
  stage("anchor", [&] {
    parallel_for(n_seg, threads, [&](std::size_t i) {
      timings[i].segment = i;
      timings[i].start_s = out.segment_starts[i];
      timings[i].planned = planned_transcripts[i];
      if (planned_audio[i]) {
        timings[i].planned_envelope = energy_envelope(*planned_audio[i], kEnvelopeHopS, kEnvelopeHopS);
        timings[i].realized_envelope = energy_envelope(narrations[i].narration.audio, kEnvelopeHopS, kEnvelopeHopS);
      }
    });
    out.anchors = anchor_cues(timings, full.cues, config.dtw);
    return 0;
  });
  double dtw_cost = 0.0;
  {
    std::map<std::size_t, double> per_segment;
    for (std::size_t k = 0; k < full.cues.size(); ++k) {
      if (out.anchors[k].dtw_cost > 0.0) per_segment[static_cast<std::size_t>(full.cues[k].anchor.segment)] = out.anchors[k].dtw_cost;
    }
    for (const auto& [s, c] : per_segment) dtw_cost += c;
    nlohmann::json onsets = nlohmann::json::array();
    for (const auto& a : out.anchors) onsets.push_back({{"cue_id", a.cue_id}, {"onset_s", a.onset_s}});
    log.post("temporal", "orchestrator", MessageKind::kResult, 1, {m_anchor_req},
             {{"schema", "result.anchor/1"}, {"onsets", onsets}, {"dtw_cost", dtw_cost}});
  }
  const int m_anchor = static_cast<int>(log.messages().size());

  // Sound effects and spatialization, one task per cue.
  const std::size_t n_cue = out.plan.cues.size();
  const int m_sfx_req = log.post("orchestrator", "sfx", MessageKind::kRequest, 1, {m_plan},
                                 {{"schema", "request.sfx/1"}, {"cues", n_cue}});
  std::vector<CueAudio> cue_audio(n_cue);
  stage("sfx", [&] {
    parallel_for(n_cue, threads, [&](std::size_t k) {
      const CuePlan& cp = out.plan.cues[k];
      cue_audio[k] = cp.resolution == Provenance::kRetrieved ? load_asset(*index.find(cp.asset_id), asset_root, kRate)
                                                               : synthesize_procedural(cp.event, cp.duration_s, cp.seed, kRate);
      cue_audio[k].cue_id = cp.cue_id;
    });
    return 0;
  });
  {
    nlohmann::json cues = nlohmann::json::array();
    for (const auto& c : cue_audio) {
      cues.push_back({{"cue_id", c.cue_id}, {"provenance", to_string(c.provenance)}, {"frames", c.buffer.frames()},
                      {"hash", hex(hash_audio(c.buffer))}});
    }
    log.post("sfx", "orchestrator", MessageKind::kResult, 1, {m_sfx_req}, {{"schema", "result.sfx/1"}, {"cues", cues}});
  }
  const int m_sfx = static_cast<int>(log.messages().size());
  const int m_spatial_req = log.post("orchestrator", "spatial", MessageKind::kRequest, 1, {m_sfx},
                                     {{"schema", "request.spatial/1"},
                                      {"order", config.order},
                                      {"profile", to_string(config.listener.mode)}});
  std::vector<RenderedCue> rendered(n_cue);
  stage("spatial", [&] {
    parallel_for(n_cue, threads, [&](std::size_t k) {
      const CuePlan& cp = out.plan.cues[k];
      rendered[k] = render_cue(cue_audio[k], cp.spatial, env_table.at(cp.spatial.environment), config.listener, config.order);
    });
    return 0;
  });
  std::vector<double> stem_onset(n_cue), stem_rms(n_cue);
  parallel_for(n_cue, threads, [&](std::size_t k) {
    stem_onset[k] = detect_onset(rendered[k].audio, config.w_short, config.w_long);
    stem_rms[k] = measure_loudness(rendered[k].audio).rms_db;
  });
  {
    nlohmann::json cues = nlohmann::json::array();
    for (std::size_t k = 0; k < n_cue; ++k) {
      cues.push_back({{"cue_id", out.plan.cues[k].cue_id},
                      {"latency_s", rendered[k].latency_s},
                      {"onset_s", stem_onset[k]},
                      {"rms_db", stem_rms[k]}});
    }
    log.post("spatial", "orchestrator", MessageKind::kResult, 1, {m_spatial_req},
             {{"schema", "result.spatial/1"}, {"cues", cues}});
  }
  const int m_spatial = static_cast<int>(log.messages().size());

  // Initial mix plan: each layer balanced to the bed target and placed so
  // its propagation latency lands on the anchor.
  const double narration_db = stage("mix", [&] { return measure_loudness(out.narration).rms_db; });
  const double target_ratio = config.targets.bed_rms_db - config.targets.narration_rms_db;
  MixPlan mix;
  mix.profile = config.listener.mode;
  mix.targets = config.targets;
  std::map<std::string, std::size_t> cue_index;
  for (std::size_t k = 0; k < n_cue; ++k) {
    const CuePlan& cp = out.plan.cues[k];
    cue_index[cp.cue_id] = k;
    CueAdjustment adj;
    if (auto it = config.adjustments.find(cp.cue_id); it != config.adjustments.end()) adj = it->second;
    const double gain = std::min(db_to_gain(narration_db + target_ratio - stem_rms[k]), db_to_gain(24.0)) *
                        db_to_gain(adj.gain_db);
    const double onset = std::max(0.0, out.anchors[k].onset_s - rendered[k].latency_s + adj.onset_offset_ms / 1000.0);
    mix.layers.push_back({cp.cue_id, onset, {{0.0, gain}}});
    out.stems[cp.cue_id] = rendered[k].audio;
    out.stem_onsets[cp.cue_id] = stem_onset[k];
  }
  for (const auto& [id, a] : config.adjustments) {
    if (!cue_index.contains(id)) warnings.push_back("adjustment for unknown cue '" + id + "' ignored");
  }

  // Mix, master, measure; correct and repeat.
  std::vector<IterationMetrics> history;
  int parent = -1;
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    std::vector<int> parents = iter == 1 ? std::vector<int>{m_anchor, m_spatial} : std::vector<int>{parent};
    const int m_mix_req = log.post("orchestrator", "mixer", MessageKind::kRequest, iter, parents,
                                   {{"schema", "request.mix/1"}, {"mix", mix_plan_to_json(mix)}});
    Measurement meas = stage("mix", [&] {
      const AudioBuffer narration_solo = scaled(out.narration, mix.narration_gain);
      const double solo_db = measure_loudness(narration_solo).rms_db;
      const double master_gain = solo_db > kSilenceFloorDb ? db_to_gain(config.targets.narration_rms_db - solo_db) : 1.0;
      const AudioBuffer fg = scaled(narration_solo, master_gain);

      std::map<std::string, AudioBuffer> ducked;
      std::vector<AudioBuffer> ducked_vec(mix.layers.size());
      parallel_for(mix.layers.size(), threads, [&](std::size_t k) {
        const LayerPlan& l = mix.layers[k];
        const AudioBuffer& stem = out.stems.at(l.cue_id);
        const auto start = static_cast<std::size_t>(std::llround(l.onset_s * kRate));
        const FeatureSeries env =
            energy_envelope(slice_mono(fg, start, stem.frames()), kEnvelopeHopS, kEnvelopeHopS, false);
        ducked_vec[k] = duck(stem, env, config.duck);
      });
      for (std::size_t k = 0; k < mix.layers.size(); ++k) ducked[mix.layers[k].cue_id] = std::move(ducked_vec[k]);

      const AudioBuffer mixed = mix_layers(mix, out.narration, ducked, threads);
      MasterResult mastered = master(mix, mixed, narration_solo);

      Measurement m;
      QualityReport& r = m.report;
      r.dtw_cost = dtw_cost;
      r.warnings = warnings;
      const double pre_narr_db = solo_db;
      for (const auto& l : mix.layers) {
        const std::size_t k = cue_index.at(l.cue_id);
        CueAlignment a;
        a.cue_id = l.cue_id;
        a.planned_onset_s = out.anchors[k].onset_s;
        a.realized_onset_s = l.onset_s + stem_onset[k];
        a.alignment_error_ms = (a.realized_onset_s - a.planned_onset_s) * 1000.0;
        r.cues.push_back(a);
        LayerLoudness ll;
        ll.cue_id = l.cue_id;
        ll.rms_db = measure_loudness(with_automation(out.stems.at(l.cue_id), l.automation)).rms_db;
        ll.ratio_db = ll.rms_db - pre_narr_db;
        ll.excess_db = ll.ratio_db - target_ratio;
        r.layers.push_back(ll);
        if (r.layers.size() == 1 || ll.rms_db > r.bed_rms_db) {
          r.bed_rms_db = ll.rms_db;
          r.ratio_db = ll.ratio_db;
        }
      }
      // The narration solo path through the same gain and limiter curve.
      AudioBuffer solo = apply_profile(AudioBuffer(kRate, {std::vector<double>(narration_solo.channel(0).begin(),
                                                                               narration_solo.channel(0).end()),
                                                           std::vector<double>(narration_solo.channel(0).begin(),
                                                                               narration_solo.channel(0).end())}),
                                       mix.profile);
      for (std::size_t c = 0; c < 2; ++c) {
        auto ch = solo.channel(c);
        for (std::size_t i = 0; i < ch.size(); ++i) {
          ch[i] *= mastered.gain * (mastered.limiter_gain.empty() ? 1.0 : mastered.limiter_gain[i]);
        }
      }
      r.narration_rms_db = measure_loudness(solo).rms_db;
      r.peak_db = measure_loudness(mastered.audio).peak_db;
      for (const double f_m : {4.0, 16.0}) {
        constexpr double kCarrier = 1000.0, kDepth = 0.5;
        const AudioBuffer probe = am_probe(kCarrier, f_m, kDepth, 3.0, pre_narr_db);
        const AudioBuffer chained = through_master_chain(probe, mix.profile, mastered.gain, mix.targets.ceiling_db);
        TmtfCheck tc;
        tc.name = "master_chain_" + std::to_string(static_cast<int>(f_m)) + "hz";
        tc.f_m = f_m;
        tc.f_c = kCarrier;
        tc.depth = kDepth;
        tc.expected_db = 20.0 * std::log10(kDepth / 2.0);
        tc.measured_db = tmtf(AudioBuffer::mono(kRate, std::vector<double>(chained.channel(0).begin(), chained.channel(0).end())),
                              f_m, kCarrier);
        r.tmtf_checks.push_back(tc);
      }
      m.master = std::move(mastered.audio);
      r.evaluate(config);
      return m;
    });
    const int m_mix = log.post("mixer", "critic", MessageKind::kResult, iter, {m_mix_req},
                               {{"schema", "result.mix/1"},
                                {"frames", meas.master.frames()},
                                {"peak_db", meas.report.peak_db},
                                {"hash", hex(hash_audio(meas.master))}});
    IterationMetrics im;
    im.iteration = iter;
    for (const auto& c : meas.report.cues) im.max_alignment_error_ms = std::max(im.max_alignment_error_ms, std::abs(c.alignment_error_ms));
    for (const auto& l : meas.report.layers) im.max_loudness_excess_db = std::max(im.max_loudness_excess_db, l.excess_db);
    im.pass = meas.report.pass;
    history.push_back(im);
    const int m_quality = log.post("critic", "orchestrator", MessageKind::kResult, iter, {m_mix},
                                   {{"schema", "result.quality/1"},
                                    {"pass", im.pass},
                                    {"max_alignment_error_ms", im.max_alignment_error_ms},
                                    {"max_loudness_excess_db", im.max_loudness_excess_db}});
    out.master = std::move(meas.master);
    out.report = std::move(meas.report);
    out.report.iterations_run = iter;
    if (out.report.pass || iter == config.max_iters) break;
    CritiqueResult crit = critique_and_correct(out.report, mix, config);
    parent = log.post("critic", "mixer", MessageKind::kCritique, iter, {m_quality},
                      {{"schema", "critique.correction/1"},
                       {"done", crit.done},
                       {"corrections", corrections_to_json(crit.corrections)}});
    if (crit.done || crit.corrections.empty()) break;
    mix = std::move(crit.plan);
  }
  out.report.history = history;
  out.mix = mix;
  out.messages = log.messages();
  return out;
}

RenderOutcome render_project(const Project& project, const RenderOptions& options) {
  const std::string text = stage("parse", [&] {
    std::ifstream in(project.script, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + project.script.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  });
  ParseResult parsed = parse_script(text);
  if (!parsed.doc) {
    std::string msg;
    for (const auto& d : parsed.diagnostics) msg += (msg.empty() ? "" : "; ") + format(d);
    throw StageError("parse", msg);
  }
  AssetIndex index;
  std::vector<std::string> index_warnings;
  if (!project.assets.empty()) {
    IndexBuild built = stage("sfx", [&] { return index_assets(project.assets, std::max(1, options.threads)); });
    index = std::move(built.index);
    index_warnings = std::move(built.warnings);
  }
  RenderOutcome out = render_document(*parsed.doc, index, project.assets, project.config, options);
  for (auto& w : index_warnings) out.report.warnings.push_back("assets: " + w);
  return out;
}

void write_outputs(const RenderOutcome& outcome, const std::filesystem::path& dir) {
  stage("write", [&] {
    std::filesystem::create_directories(dir);
    write_wav(outcome.master, dir / "master.wav", WavFormat::kFloat32);
    auto write_text = [&](const std::filesystem::path& p, const std::string& s) {
      std::ofstream f(p, std::ios::binary | std::ios::trunc);
      if (!f) throw std::runtime_error("cannot write " + p.string());
      f << s;
      if (!f) throw std::runtime_error("write failed for " + p.string());
    };
    write_text(dir / "report.json", report_to_json(outcome.report).dump(2) + "\n");
    write_text(dir / "messages.jsonl", to_jsonl(outcome.messages));
    nlohmann::json plan = plan_to_json(outcome.plan);
    plan["mix"] = mix_plan_to_json(outcome.mix);
    write_text(dir / "plan.json", plan.dump(2) + "\n");
    return 0;
  });
}

}  // namespace audiobook
