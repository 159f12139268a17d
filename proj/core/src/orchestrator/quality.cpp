#include "audiobook/orchestrator/quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace audiobook {

void QualityReport::evaluate(const ProjectConfig& config) {
  const auto& th = config.thresholds;
  bool all = true;
  for (auto& c : cues) {
    c.pass = std::abs(c.alignment_error_ms) <= th.alignment_ms;
    all = all && c.pass;
  }
  for (auto& l : layers) {
    l.pass = l.excess_db <= th.loudness_db;
    all = all && l.pass;
  }
  narration_pass = std::abs(narration_rms_db - config.targets.narration_rms_db) <= th.loudness_db;
  for (auto& t : tmtf_checks) {
    t.pass = std::abs(t.measured_db - t.expected_db) <= th.tmtf_db;
    all = all && t.pass;
  }
  pass = all && narration_pass && peak_db <= config.targets.ceiling_db;
}

nlohmann::json report_to_json(const QualityReport& r) {
  nlohmann::json cues = nlohmann::json::array();
  for (const auto& c : r.cues) {
    cues.push_back({{"cue_id", c.cue_id},
                    {"planned_onset_s", c.planned_onset_s},
                    {"realized_onset_s", c.realized_onset_s},
                    {"alignment_error_ms", c.alignment_error_ms},
                    {"pass", c.pass}});
  }
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : r.layers) {
    layers.push_back({{"cue_id", l.cue_id}, {"rms_db", l.rms_db}, {"ratio_db", l.ratio_db},
                      {"excess_db", l.excess_db}, {"pass", l.pass}});
  }
  nlohmann::json tmtf = nlohmann::json::array();
  for (const auto& t : r.tmtf_checks) {
    tmtf.push_back({{"name", t.name}, {"f_m", t.f_m}, {"f_c", t.f_c}, {"depth", t.depth},
                    {"expected_db", t.expected_db}, {"measured_db", t.measured_db}, {"pass", t.pass}});
  }
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : r.history) {
    history.push_back({{"iteration", h.iteration},
                       {"max_alignment_error_ms", h.max_alignment_error_ms},
                       {"max_loudness_excess_db", h.max_loudness_excess_db},
                       {"pass", h.pass}});
  }
  return {{"pass", r.pass},
          {"iterations_run", r.iterations_run},
          {"cues", cues},
          {"loudness",
           {{"narration_rms_db", r.narration_rms_db},
            {"narration_pass", r.narration_pass},
            {"bed_rms_db", r.bed_rms_db},
            {"ratio_db", r.ratio_db},
            {"peak_db", r.peak_db},
            {"layers", layers}}},
          {"dtw_cost", r.dtw_cost},
          {"tmtf_checks", tmtf},
          {"history", history},
          {"warnings", r.warnings}};
}

QualityReport report_from_json(const nlohmann::json& j) {
  QualityReport r;
  r.pass = j.at("pass").get<bool>();
  r.iterations_run = j.at("iterations_run").get<int>();
  for (const auto& c : j.at("cues")) {
    r.cues.push_back({c.at("cue_id").get<std::string>(), c.at("planned_onset_s").get<double>(),
                      c.at("realized_onset_s").get<double>(), c.at("alignment_error_ms").get<double>(),
                      c.at("pass").get<bool>()});
  }
  const auto& loud = j.at("loudness");
  r.narration_rms_db = loud.at("narration_rms_db").get<double>();
  r.narration_pass = loud.at("narration_pass").get<bool>();
  r.bed_rms_db = loud.at("bed_rms_db").get<double>();
  r.ratio_db = loud.at("ratio_db").get<double>();
  r.peak_db = loud.at("peak_db").get<double>();
  for (const auto& l : loud.at("layers")) {
    r.layers.push_back({l.at("cue_id").get<std::string>(), l.at("rms_db").get<double>(), l.at("ratio_db").get<double>(),
                        l.at("excess_db").get<double>(), l.at("pass").get<bool>()});
  }
  r.dtw_cost = j.at("dtw_cost").get<double>();
  for (const auto& t : j.at("tmtf_checks")) {
    r.tmtf_checks.push_back({t.at("name").get<std::string>(), t.at("f_m").get<double>(), t.at("f_c").get<double>(),
                             t.at("depth").get<double>(), t.at("expected_db").get<double>(),
                             t.at("measured_db").get<double>(), t.at("pass").get<bool>()});
  }
  for (const auto& h : j.at("history")) {
    r.history.push_back({h.at("iteration").get<int>(), h.at("max_alignment_error_ms").get<double>(),
                         h.at("max_loudness_excess_db").get<double>(), h.at("pass").get<bool>()});
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

CritiqueResult critique_and_correct(const QualityReport& report, const MixPlan& plan, const ProjectConfig& config) {
  CritiqueResult out{plan, false, {}};
  if (report.pass) {
    out.done = true;
    return out;
  }
  std::map<std::string, LayerPlan*> layers;
  for (auto& l : out.plan.layers) layers[l.cue_id] = &l;
  for (const auto& c : report.cues) {
    if (std::abs(c.alignment_error_ms) <= config.thresholds.alignment_ms) continue;
    auto it = layers.find(c.cue_id);
    if (it == layers.end()) continue;
    it->second->onset_s = std::max(0.0, it->second->onset_s - c.alignment_error_ms / 1000.0);
    out.corrections.push_back({"shift_onset", c.cue_id, -c.alignment_error_ms});
  }
  for (const auto& l : report.layers) {
    if (l.excess_db <= config.thresholds.loudness_db) continue;
    auto it = layers.find(l.cue_id);
    if (it == layers.end()) continue;
    const double g = db_to_gain(-l.excess_db);
    if (it->second->automation.empty()) it->second->automation.push_back({0.0, 1.0});
    for (auto& key : it->second->automation) key.gain *= g;
    out.corrections.push_back({"lower_gain", l.cue_id, -l.excess_db});
  }
  return out;
}

nlohmann::json corrections_to_json(const std::vector<Correction>& corrections) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : corrections) arr.push_back({{"rule", c.rule}, {"cue_id", c.cue_id}, {"amount", c.amount}});
  return arr;
}

}  // namespace audiobook
