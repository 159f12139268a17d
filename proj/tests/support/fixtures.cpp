#include "fixtures.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fixtures {

namespace fs = std::filesystem;

fs::path source_dir() { return fs::path(AUDIOBOOK_TEST_SOURCE_DIR); }

fs::path demo_project_path() { return source_dir() / "demo" / "demo.project"; }

fs::path fixture_path(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }

fs::path stretch_narrator_path() { return fs::path(AUDIOBOOK_STRETCH_NARRATOR); }

TempDir::TempDir(const std::string& prefix) {
  std::random_device rd;
  const fs::path base = fs::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    fs::path p = base / (prefix + "-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("TempDir: could not create a directory under " + base.string());
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

audiobook::Project stretch_project(const fs::path& dir, double factor) {
  const fs::path demo = source_dir() / "demo";
  nlohmann::json j = {
      {"script", (demo / "demo.script").string()},
      {"assets", (demo / "assets").string()},
      {"config",
       {{"order", 3},
        {"profile", "binaural"},
        {"seed", 7},
        {"max_iters", 3},
        {"tts",
         {{"command", {stretch_narrator_path().string(), std::to_string(factor)}},
          {"fallback", false},
          {"max_processes", 2}}}}}};
  const fs::path file = dir / "stretch.project";
  std::ofstream(file) << j.dump(2) << "\n";
  return audiobook::load_project(file);
}

audiobook::Project correction_project() {
  audiobook::Project p = audiobook::load_project(demo_project_path());
  p.config.adjustments["door"].onset_offset_ms = 80.0;
  p.config.adjustments["downpour"].gain_db = 6.0;
  return p;
}

}  // namespace fixtures
