#include "audiobook/orchestrator/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "audiobook/orchestrator/render.hpp"
#include "audiobook/script/json.hpp"
#include "audiobook/script/parser.hpp"
#include "audiobook/sfx/sfx.hpp"

namespace audiobook {
namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> order;
  std::optional<std::string> profile;
  std::optional<int> max_iters;
  int threads = 1;
  std::string out;

  void apply(ProjectConfig& c) const {
    if (seed) c.seed = *seed;
    if (order) c.order = *order;
    if (profile) c.listener.mode = parse_playback_mode(*profile);
    if (max_iters) c.max_iters = *max_iters;
    c.validate();
  }
};

void add_render_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Render seed");
  cmd->add_option("--order", o.order, "Ambisonic order (1-3)");
  cmd->add_option("--profile", o.profile, "binaural or stereo_speakers");
  cmd->add_option("--max-iters", o.max_iters, "Correction loop iterations");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 256));
}

std::optional<std::string> read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open " << path << "\n";
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Parses a script, printing diagnostics as "<path>:<line>:<col>: ...".
std::optional<ScriptDoc> load_script(const std::string& path, std::ostream& err) {
  auto text = read_file(path, err);
  if (!text) return std::nullopt;
  ParseResult r = parse_script(*text);
  for (const auto& d : r.diagnostics) err << path << ":" << format(d) << "\n";
  return r.doc;
}

int run_report(const std::string& target, std::ostream& out, std::ostream& err) {
  std::filesystem::path p(target);
  if (std::filesystem::is_directory(p)) p /= "report.json";
  auto text = read_file(p.string(), err);
  if (!text) return kExitRender;
  QualityReport r;
  try {
    r = report_from_json(nlohmann::json::parse(*text));
  } catch (const std::exception& e) {
    err << "error: " << p.string() << ": " << e.what() << "\n";
    return kExitRender;
  }
  out << "quality: " << (r.pass ? "PASS" : "FAIL") << " after " << r.iterations_run << " iteration(s)\n";
  for (const auto& c : r.cues) {
    out << "  cue " << c.cue_id << ": planned " << c.planned_onset_s << " s, realized " << c.realized_onset_s
        << " s, error " << c.alignment_error_ms << " ms" << (c.pass ? "" : "  <- off") << "\n";
  }
  for (const auto& l : r.layers) {
    out << "  layer " << l.cue_id << ": " << l.ratio_db << " dB vs narration" << (l.pass ? "" : "  <- hot") << "\n";
  }
  out << "  narration " << r.narration_rms_db << " dB RMS, peak " << r.peak_db << " dB, dtw cost " << r.dtw_cost << "\n";
  for (const auto& t : r.tmtf_checks) {
    out << "  tmtf " << t.name << ": " << t.measured_db << " dB (expected " << t.expected_db << ")\n";
  }
  for (const auto& w : r.warnings) out << "  warning: " << w << "\n";
  return r.pass ? kExitOk : kExitValidation;
}

int stage_exit(const StageError& e) {
  return e.stage() == "parse" || e.stage() == "validate" ? kExitValidation : kExitRender;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Script-to-audiobook renderer", "audiobook"};
  app.require_subcommand(1);

  std::string script_path;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a script and print it as JSON");
  parse_cmd->add_option("script", script_path)->required();
  auto* check_cmd = app.add_subcommand("check", "Validate a script");
  check_cmd->add_option("script", script_path)->required();

  std::string project_path;
  Overrides plan_o, render_o;
  auto* plan_cmd = app.add_subcommand("plan", "Print the render plan of a project or script");
  plan_cmd->add_option("project", project_path)->required();
  add_render_flags(plan_cmd, plan_o);
  plan_cmd->add_option("--out", plan_o.out, "Write plan.json into this directory");

  auto* assets_cmd = app.add_subcommand("assets", "Asset library tools");
  assets_cmd->require_subcommand(1);
  std::string assets_dir, index_out;
  int index_threads = 1;
  auto* index_cmd = assets_cmd->add_subcommand("index", "Index tagged WAV files");
  index_cmd->add_option("dir", assets_dir)->required();
  index_cmd->add_option("--out", index_out, "Write the index to this file");
  index_cmd->add_option("--threads", index_threads)->check(CLI::Range(1, 256));

  auto* render_cmd = app.add_subcommand("render", "Render a project or script");
  render_cmd->add_option("project", project_path)->required();
  add_render_flags(render_cmd, render_o);
  render_cmd->add_option("--out", render_o.out, "Output directory (default: the project's)");

  std::string report_target;
  auto* report_cmd = app.add_subcommand("report", "Summarize report.json");
  report_cmd->add_option("target", report_target, "Output directory or report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*parse_cmd) {
      auto doc = load_script(script_path, err);
      if (!doc) return kExitValidation;
      out << nlohmann::json(*doc).dump(2) << "\n";
      return kExitOk;
    }
    if (*check_cmd) return load_script(script_path, err) ? kExitOk : kExitValidation;
    if (*index_cmd) {
      IndexBuild built = index_assets(assets_dir, index_threads);
      for (const auto& w : built.warnings) err << "warning: " << w << "\n";
      const std::string text = serialize_index(built.index);
      if (index_out.empty()) {
        out << text;
      } else {
        std::ofstream f(index_out, std::ios::binary | std::ios::trunc);
        if (!(f << text)) {
          err << "error: cannot write " << index_out << "\n";
          return kExitRender;
        }
      }
      return kExitOk;
    }
    if (*report_cmd) return run_report(report_target, out, err);

    Overrides& o = *plan_cmd ? plan_o : render_o;
    Project project;
    try {
      project = load_project(project_path);
      o.apply(project.config);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    }
    if (*plan_cmd) {
      auto doc = load_script(project.script.string(), err);
      if (!doc) return kExitValidation;
      AssetIndex index;
      if (!project.assets.empty()) index = index_assets(project.assets, o.threads).index;
      RenderPlan rp;
      try {
        rp = plan(*doc, index, project.config);
      } catch (const PlanError& e) {
        err << "plan: " << e.what() << "\n";
        return kExitRender;
      }
      const std::string text = plan_to_json(rp).dump(2) + "\n";
      if (o.out.empty()) {
        out << text;
      } else {
        std::filesystem::create_directories(o.out);
        std::ofstream f(std::filesystem::path(o.out) / "plan.json", std::ios::binary | std::ios::trunc);
        f << text;
      }
      return kExitOk;
    }
    // render
    const std::filesystem::path out_dir = !o.out.empty() ? std::filesystem::path(o.out) : project.output;
    if (out_dir.empty()) {
      err << "error: render needs --out (the project names no output directory)\n";
      return kExitUsage;
    }
    RenderOutcome outcome = render_project(project, {o.threads});
    write_outputs(outcome, out_dir);
    for (const auto& w : outcome.report.warnings) err << "warning: " << w << "\n";
    out << "wrote " << (out_dir / "master.wav").string() << " (" << outcome.master.duration_s() << " s), quality "
        << (outcome.report.pass ? "PASS" : "FAIL") << " after " << outcome.report.iterations_run << " iteration(s)\n";
    return kExitOk;
  } catch (const StageError& e) {
    err << e.what() << "\n";
    return stage_exit(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRender;
  }
}

}  // namespace audiobook
