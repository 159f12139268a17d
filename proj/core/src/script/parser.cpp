#include "audiobook/script/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "audiobook/data.hpp"
#include "audiobook/script/text.hpp"

namespace audiobook {
namespace {

struct Position {
  int line = 0;
  int column = 0;
};

// Maps a segment or cue index to where it was written. Documents built in
// code have no positions.
struct Locator {
  std::function<Position(std::size_t)> segment = [](std::size_t) { return Position{}; };
  std::function<Position(std::size_t)> cue = [](std::size_t) { return Position{}; };
};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) return std::nullopt;
  return v;
}

std::string fmt_num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

bool is_ident(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_' || c == '-')) return false;
  }
  return true;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t b = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

const std::set<std::string>& environment_ids() {
  static const std::set<std::string> ids = [] {
    std::set<std::string> out;
    for (const auto& [k, v] : nlohmann::json::parse(data::environments).items()) out.insert(k);
    return out;
  }();
  return ids;
}

std::vector<Diagnostic> validate_impl(const ScriptDoc& doc, const CueLexicon& lexicon,
                                      const Locator& loc) {
  std::vector<Diagnostic> out;
  const auto at_seg = [&](std::size_t i, DiagCode code, std::string msg) {
    const Position p = loc.segment(i);
    out.push_back({code, p.line, p.column, std::move(msg)});
  };
  const auto at_cue = [&](std::size_t i, DiagCode code, std::string msg) {
    const Position p = loc.cue(i);
    out.push_back({code, p.line, p.column, std::move(msg)});
  };

  for (const auto& [id, v] : doc.voices) {
    if (v.voice_id != id) {
      out.push_back({DiagCode::kSyntax, 0, 0, "voice map key '" + id + "' names voice '" + v.voice_id + "'"});
    }
    if (!(v.base_pitch >= 50.0 && v.base_pitch <= 400.0)) {
      out.push_back({DiagCode::kOutOfRange, 0, 0, "voice '" + id + "' pitch " + fmt_num(v.base_pitch) + " Hz outside 50..400"});
    }
    if (!(v.rate >= 60.0 && v.rate <= 300.0)) {
      out.push_back({DiagCode::kOutOfRange, 0, 0, "voice '" + id + "' rate " + fmt_num(v.rate) + " wpm outside 60..300"});
    }
  }

  if (doc.segments.empty()) out.push_back({DiagCode::kNoSegments, 0, 0, "document has no segments"});
  std::vector<std::size_t> word_counts;
  for (std::size_t i = 0; i < doc.segments.size(); ++i) {
    const Segment& s = doc.segments[i];
    if (s.index != static_cast<int>(i)) {
      at_seg(i, DiagCode::kOutOfRange, "segment at position " + std::to_string(i) + " has index " + std::to_string(s.index));
    }
    word_counts.push_back(tokenize_words(s.text).size());
    if (word_counts.back() == 0) at_seg(i, DiagCode::kEmptyText, "segment " + std::to_string(i) + " has no words");
    if (!(s.sentiment >= -1.0 && s.sentiment <= 1.0)) {
      at_seg(i, DiagCode::kOutOfRange, "segment " + std::to_string(i) + " sentiment outside [-1, 1]");
    }
    if (!doc.voices.contains(s.voice_id)) {
      at_seg(i, DiagCode::kUnknownVoice, "segment " + std::to_string(i) + " uses undeclared voice '" + s.voice_id + "'");
    }
  }

  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.cues.size(); ++i) {
    const SoundCue& c = doc.cues[i];
    const std::string name = "cue '" + c.cue_id + "'";
    if (c.cue_id.empty()) at_cue(i, DiagCode::kMalformedCue, "cue has an empty id");
    if (!seen.insert(c.cue_id).second) at_cue(i, DiagCode::kDuplicateCueId, "duplicate cue id '" + c.cue_id + "'");

    const auto& a = c.anchor;
    if (a.segment < 0 || static_cast<std::size_t>(a.segment) >= doc.segments.size()) {
      at_cue(i, DiagCode::kDanglingAnchor, name + " anchored to segment " + std::to_string(a.segment) + " of a " + std::to_string(doc.segments.size()) + "-segment document");
    } else if (a.word.has_value() == a.time_s.has_value()) {
      at_cue(i, DiagCode::kDanglingAnchor, name + " needs exactly one of a word index or an absolute time");
    } else if (a.word && (*a.word < 0 || static_cast<std::size_t>(*a.word) >= word_counts[static_cast<std::size_t>(a.segment)])) {
      at_cue(i, DiagCode::kDanglingAnchor, name + " anchored to word " + std::to_string(*a.word) + " of a " + std::to_string(word_counts[static_cast<std::size_t>(a.segment)]) + "-word segment");
    }
    if (a.time_s && !(*a.time_s >= 0.0)) at_cue(i, DiagCode::kOutOfRange, name + " absolute time is negative");

    if (!lexicon.is_event(c.event) && !c.asset) {
      at_cue(i, DiagCode::kUnknownEvent, name + " event '" + c.event + "' is not in the cue lexicon and names no asset");
    }
    const SpatialSpec& sp = c.spatial;
    const auto check_angles = [&](double az, double el, double d, const std::string& where) {
      if (!(az >= -180.0 && az <= 180.0)) at_cue(i, DiagCode::kOutOfRange, name + where + " azimuth outside -180..180");
      if (!(el >= -90.0 && el <= 90.0)) at_cue(i, DiagCode::kOutOfRange, name + where + " elevation outside -90..90");
      if (!(d > 0.0)) at_cue(i, DiagCode::kOutOfRange, name + where + " distance must be positive");
    };
    check_angles(sp.azimuth, sp.elevation, sp.distance, "");
    if (!environment_ids().contains(sp.environment)) {
      at_cue(i, DiagCode::kOutOfRange, name + " unknown environment '" + sp.environment + "'");
    }
    if (!sp.trajectory.empty()) {
      if (sp.trajectory.front().time_s != 0.0) {
        at_cue(i, DiagCode::kInvalidTrajectory, name + " trajectory must start at time 0");
      }
      for (std::size_t k = 1; k < sp.trajectory.size(); ++k) {
        if (!(sp.trajectory[k].time_s > sp.trajectory[k - 1].time_s)) {
          at_cue(i, DiagCode::kInvalidTrajectory, name + " trajectory times must strictly increase");
          break;
        }
      }
      for (std::size_t k = 0; k < sp.trajectory.size(); ++k) {
        const auto& kf = sp.trajectory[k];
        check_angles(kf.azimuth, kf.elevation, kf.distance, " keyframe " + std::to_string(k));
      }
    }
    if (c.duration_s && !(*c.duration_s > 0.0)) at_cue(i, DiagCode::kOutOfRange, name + " duration must be positive");
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) at_cue(i, DiagCode::kOutOfRange, name + " confidence outside [0, 1]");
  }
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const CueLexicon& lexicon) : text_(text), lexicon_(lexicon) {}

  ParseResult run() {
    std::size_t bad = 0;
    if (!is_valid_utf8(text_, &bad)) {
      int line = 1;
      std::size_t line_start = 0;
      for (std::size_t i = 0; i < bad; ++i) {
        if (text_[i] == '\n') {
          ++line;
          line_start = i + 1;
        }
      }
      diag(DiagCode::kInvalidUtf8, line, static_cast<int>(bad - line_start) + 1, "invalid UTF-8 byte sequence");
      return finish();
    }
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text_.size()) {
      const auto nl = text_.find('\n', start);
      const auto end = nl == std::string_view::npos ? text_.size() : nl;
      auto line = text_.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }

    bool in_body = false;
    std::vector<std::pair<int, std::string_view>> para;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const int line_no = static_cast<int>(i) + 1;
      const auto t = trim(lines[i]);
      if (t.empty()) {
        flush(para);
        continue;
      }
      if (t.front() == '#') {
        if (in_body) {
          diag(DiagCode::kSyntax, line_no, 1, "header directive after body text");
        } else {
          header(line_no, t);
        }
        continue;
      }
      in_body = true;
      para.emplace_back(line_no, lines[i]);
    }
    flush(para);

    if (!doc_.voices.contains(kNarratorVoice)) {
      doc_.voices[kNarratorVoice] = VoiceProfile{kNarratorVoice, 120.0, 150.0, 0};
    }
    assign_cue_ids();
    if (doc_.segments.empty()) {
      if (diagnostics_.empty()) diag(DiagCode::kNoSegments, 0, 0, "document has no segments");
      return finish();
    }
    Locator loc;
    loc.segment = [this](std::size_t i) { return segment_pos_[i]; };
    loc.cue = [this](std::size_t i) { return cue_pos_[i]; };
    for (auto& d : validate_impl(doc_, lexicon_, loc)) {
      // Syntax problems already reported for a cue would otherwise repeat.
      if (std::find(diagnostics_.begin(), diagnostics_.end(), d) == diagnostics_.end()) {
        diagnostics_.push_back(std::move(d));
      }
    }
    return finish();
  }

 private:
  void diag(DiagCode code, int line, int col, std::string msg) {
    diagnostics_.push_back({code, line, col, std::move(msg)});
  }

  ParseResult finish() {
    ParseResult r;
    r.diagnostics = std::move(diagnostics_);
    if (r.diagnostics.empty()) r.doc = std::move(doc_);
    return r;
  }

  void header(int line_no, std::string_view t) {
    const auto words = split_ws(t);
    const auto directive = words.front();
    if (directive == "#title") {
      doc_.title = std::string(trim(t.substr(6)));
    } else if (directive == "#env") {
      if (words.size() != 2) {
        diag(DiagCode::kSyntax, line_no, 1, "#env takes exactly one preset id");
      } else if (!environment_ids().contains(std::string(words[1]))) {
        diag(DiagCode::kOutOfRange, line_no, 6, "unknown environment '" + std::string(words[1]) + "'");
      } else {
        doc_.environment = std::string(words[1]);
      }
    } else if (directive == "#voice") {
      voice(line_no, words);
    } else {
      diag(DiagCode::kSyntax, line_no, 1, "unknown directive '" + std::string(directive) + "'");
    }
  }

  void voice(int line_no, const std::vector<std::string_view>& words) {
    if (words.size() < 2 || !is_ident(words[1])) {
      diag(DiagCode::kSyntax, line_no, 1, "#voice needs an identifier");
      return;
    }
    VoiceProfile v;
    v.voice_id = std::string(words[1]);
    bool ok = true;
    for (std::size_t k = 2; k < words.size(); ++k) {
      const auto eq = words[k].find('=');
      const auto key = words[k].substr(0, eq);
      const auto val = eq == std::string_view::npos ? std::string_view{} : words[k].substr(eq + 1);
      if (key == "pitch" || key == "rate") {
        const auto n = parse_double(val);
        if (!n) {
          diag(DiagCode::kSyntax, line_no, 1, "bad number in '" + std::string(words[k]) + "'");
          ok = false;
        } else if (key == "pitch") {
          v.base_pitch = *n;
        } else {
          v.rate = *n;
        }
      } else if (key == "seed") {
        const auto n = parse_int(val);
        if (!n) {
          diag(DiagCode::kSyntax, line_no, 1, "bad integer in '" + std::string(words[k]) + "'");
          ok = false;
        } else {
          v.timbre_seed = *n;
        }
      } else {
        diag(DiagCode::kSyntax, line_no, 1, "unknown voice parameter '" + std::string(key) + "'");
        ok = false;
      }
    }
    if (!(v.base_pitch >= 50.0 && v.base_pitch <= 400.0)) {
      diag(DiagCode::kOutOfRange, line_no, 1, "voice pitch outside 50..400 Hz");
      ok = false;
    }
    if (!(v.rate >= 60.0 && v.rate <= 300.0)) {
      diag(DiagCode::kOutOfRange, line_no, 1, "voice rate outside 60..300 wpm");
      ok = false;
    }
    if (doc_.voices.contains(v.voice_id)) {
      diag(DiagCode::kSyntax, line_no, 1, "voice '" + v.voice_id + "' declared twice");
      ok = false;
    }
    if (ok) doc_.voices[v.voice_id] = v;
  }

  struct PendingCue {
    SoundCue cue;
    bool explicit_id = false;
    bool explicit_at = false;
  };

  void flush(std::vector<std::pair<int, std::string_view>>& para) {
    if (para.empty()) return;
    Segment seg;
    seg.index = static_cast<int>(doc_.segments.size());
    const int first_line = para.front().first;
    std::string body;
    std::vector<Position> cue_positions;
    std::vector<PendingCue> cues;
    bool broken = false;

    for (std::size_t li = 0; li < para.size(); ++li) {
      const int line_no = para[li].first;
      std::string_view line = para[li].second;
      std::size_t offset = 0;
      if (li == 0) {
        const auto lead = line.find_first_not_of(" \t");
        if (line[lead] == '@') {
          const auto colon = line.find(':', lead);
          const auto id = colon == std::string_view::npos ? std::string_view{} : line.substr(lead + 1, colon - lead - 1);
          if (!is_ident(id)) {
            diag(DiagCode::kSyntax, line_no, static_cast<int>(lead) + 1, "dialogue prefix must be '@<voice>:'");
            broken = true;
            offset = line.size();
          } else {
            seg.kind = SegmentKind::kDialogue;
            seg.voice_id = std::string(id);
            offset = colon + 1;
          }
        }
      }
      if (!body.empty()) body.push_back(' ');
      while (offset < line.size()) {
        const auto open = line.find("[sfx:", offset);
        if (open == std::string_view::npos) {
          body.append(line.substr(offset));
          break;
        }
        body.append(line.substr(offset, open - offset));
        const int col = static_cast<int>(open) + 1;
        const auto close = line.find(']', open);
        if (close == std::string_view::npos) {
          diag(DiagCode::kMalformedCue, line_no, col, "cue tag is not closed on its line");
          broken = true;
          break;
        }
        const auto words_before = static_cast<int>(tokenize_words(body).size());
        if (auto pc = cue_tag(line.substr(open + 5, close - open - 5), line_no, col)) {
          pc->cue.anchor.segment = seg.index;
          if (!pc->explicit_at) pc->cue.anchor.word = std::max(words_before - 1, 0);
          cues.push_back(std::move(*pc));
          cue_positions.push_back({line_no, col});
        } else {
          broken = true;
        }
        body.push_back(' ');
        offset = close + 1;
      }
    }
    para.clear();

    std::string text;
    for (const auto& w : split_ws(body)) {
      if (!text.empty()) text.push_back(' ');
      text.append(w);
    }
    seg.text = std::move(text);
    if (seg.text.empty() && !broken) {
      diag(DiagCode::kEmptyText, first_line, 1, "paragraph has no text outside cue tags");
      return;
    }
    if (seg.text.empty()) return;
    doc_.segments.push_back(std::move(seg));
    segment_pos_.push_back({first_line, 1});
    for (std::size_t i = 0; i < cues.size(); ++i) {
      explicit_id_.push_back(cues[i].explicit_id);
      doc_.cues.push_back(std::move(cues[i].cue));
      cue_pos_.push_back(cue_positions[i]);
    }
  }

  std::optional<PendingCue> cue_tag(std::string_view inner, int line_no, int col) {
    PendingCue pc;
    SoundCue& c = pc.cue;
    c.spatial.environment = doc_.environment;
    const auto bar = inner.find('|');
    const auto event = trim(inner.substr(0, bar));
    std::string ev;
    for (char ch : event) ev.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (!is_ident(ev)) {
      diag(DiagCode::kMalformedCue, line_no, col, "cue tag needs an event keyword");
      return std::nullopt;
    }
    c.event = ev;
    if (bar == std::string_view::npos) return pc;

    bool ok = true;
    const auto bad = [&](const std::string& msg) {
      diag(DiagCode::kMalformedCue, line_no, col, msg);
      ok = false;
    };
    const auto range = [&](const std::string& msg) {
      diag(DiagCode::kOutOfRange, line_no, col, msg);
      ok = false;
    };
    for (const auto& param : split_ws(inner.substr(bar + 1))) {
      const auto eq = param.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        bad("cue parameter '" + std::string(param) + "' is not key=value");
        continue;
      }
      const std::string key(param.substr(0, eq));
      const auto val = param.substr(eq + 1);
      const auto number = [&]() -> std::optional<double> {
        auto n = parse_double(val);
        if (!n) bad("cue parameter " + key + " has bad number '" + std::string(val) + "'");
        return n;
      };
      if (key == "az") {
        if (auto n = number()) {
          if (*n < -180.0 || *n > 180.0) range("azimuth " + std::string(val) + " outside -180..180");
          c.spatial.azimuth = *n;
        }
      } else if (key == "el") {
        if (auto n = number()) {
          if (*n < -90.0 || *n > 90.0) range("elevation " + std::string(val) + " outside -90..90");
          c.spatial.elevation = *n;
        }
      } else if (key == "dist") {
        if (auto n = number()) {
          if (*n <= 0.0) range("distance must be positive");
          c.spatial.distance = *n;
        }
      } else if (key == "dur") {
        if (auto n = number()) {
          if (*n <= 0.0) range("duration must be positive");
          c.duration_s = *n;
        }
      } else if (key == "conf") {
        if (auto n = number()) {
          if (*n < 0.0 || *n > 1.0) range("confidence outside [0, 1]");
          c.confidence = *n;
        }
      } else if (key == "env") {
        if (!environment_ids().contains(std::string(val))) {
          range("unknown environment '" + std::string(val) + "'");
        }
        c.spatial.environment = std::string(val);
      } else if (key == "at") {
        pc.explicit_at = true;
        if (val.starts_with("t=")) {
          if (auto n = parse_double(val.substr(2))) {
            if (*n < 0.0) range("absolute cue time is negative");
            c.anchor.time_s = *n;
          } else {
            bad("cue time '" + std::string(val) + "' is not a number");
          }
        } else if (auto n = parse_int(val)) {
          if (*n < 0) range("word index is negative");
          c.anchor.word = static_cast<int>(*n);
        } else {
          bad("at= takes a word index or t=<seconds>");
        }
      } else if (key == "src") {
        if (auto s = parse_cue_source(std::string(val))) {
          c.source = *s;
        } else {
          bad("src must be auto, retrieved or procedural");
        }
      } else if (key == "asset") {
        if (!is_ident(val)) bad("asset id '" + std::string(val) + "' is not an identifier");
        c.asset = std::string(val);
      } else if (key == "id") {
        if (!is_ident(val)) bad("cue id '" + std::string(val) + "' is not an identifier");
        c.cue_id = std::string(val);
        pc.explicit_id = true;
      } else if (key == "traj") {
        std::size_t start = 0;
        while (start <= val.size()) {
          const auto semi = val.find(';', start);
          const auto item = val.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
          std::array<double, 4> f{};
          std::size_t got = 0;
          std::size_t p = 0;
          bool item_ok = true;
          while (got < 4) {
            const auto colon = item.find(':', p);
            const auto part = item.substr(p, colon == std::string_view::npos ? std::string_view::npos : colon - p);
            const auto n = parse_double(part);
            if (!n) {
              item_ok = false;
              break;
            }
            f[got++] = *n;
            if (colon == std::string_view::npos) break;
            p = colon + 1;
          }
          if (!item_ok || got != 4 || item.find(':', p) != std::string_view::npos) {
            bad("trajectory keyframe '" + std::string(item) + "' is not t:az:el:dist");
            break;
          }
          c.spatial.trajectory.push_back({f[0], f[1], f[2], f[3]});
          if (semi == std::string_view::npos) break;
          start = semi + 1;
        }
      } else {
        bad("unknown cue parameter '" + key + "'");
      }
    }
    if (!ok) return std::nullopt;
    return pc;
  }

  void assign_cue_ids() {
    std::set<std::string> taken;
    for (std::size_t i = 0; i < doc_.cues.size(); ++i) {
      if (explicit_id_[i]) taken.insert(doc_.cues[i].cue_id);
    }
    int next = 1;
    for (std::size_t i = 0; i < doc_.cues.size(); ++i) {
      if (explicit_id_[i]) continue;
      std::string id;
      do {
        id = "c" + std::to_string(next++);
      } while (taken.contains(id));
      taken.insert(id);
      doc_.cues[i].cue_id = id;
    }
  }

  std::string_view text_;
  const CueLexicon& lexicon_;
  ScriptDoc doc_;
  std::vector<Diagnostic> diagnostics_;
  std::vector<Position> segment_pos_;
  std::vector<Position> cue_pos_;
  std::vector<bool> explicit_id_;
};

}  // namespace

ParseResult parse_script(std::string_view text, const CueLexicon& lexicon) {
  return Parser(text, lexicon).run();
}

std::vector<Diagnostic> validate(const ScriptDoc& doc, const CueLexicon& lexicon) {
  return validate_impl(doc, lexicon, Locator{});
}

bool is_known_environment(const std::string& id) { return environment_ids().contains(id); }

std::string serialize_script(const ScriptDoc& doc) {
  std::ostringstream out;
  if (!doc.title.empty()) out << "#title " << doc.title << '\n';
  out << "#env " << doc.environment << '\n';
  for (const auto& [id, v] : doc.voices) {
    out << "#voice " << id << " pitch=" << fmt_num(v.base_pitch) << " rate=" << fmt_num(v.rate)
        << " seed=" << v.timbre_seed << '\n';
  }
  for (const Segment& s : doc.segments) {
    out << '\n';
    if (s.kind == SegmentKind::kDialogue) out << '@' << s.voice_id << ": ";
    out << s.text;
    for (const SoundCue& c : doc.cues) {
      if (c.anchor.segment != s.index) continue;
      const SpatialSpec& sp = c.spatial;
      out << " [sfx: " << c.event << " | id=" << c.cue_id;
      if (c.anchor.time_s) {
        out << " at=t=" << fmt_num(*c.anchor.time_s);
      } else if (c.anchor.word) {
        out << " at=" << *c.anchor.word;
      }
      out << " az=" << fmt_num(sp.azimuth) << " el=" << fmt_num(sp.elevation)
          << " dist=" << fmt_num(sp.distance) << " env=" << sp.environment;
      if (c.duration_s) out << " dur=" << fmt_num(*c.duration_s);
      out << " src=" << to_string(c.source);
      if (c.asset) out << " asset=" << *c.asset;
      out << " conf=" << fmt_num(c.confidence);
      if (!sp.trajectory.empty()) {
        out << " traj=";
        for (std::size_t k = 0; k < sp.trajectory.size(); ++k) {
          const auto& kf = sp.trajectory[k];
          if (k) out << ';';
          out << fmt_num(kf.time_s) << ':' << fmt_num(kf.azimuth) << ':' << fmt_num(kf.elevation)
              << ':' << fmt_num(kf.distance);
        }
      }
      out << ']';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace audiobook
