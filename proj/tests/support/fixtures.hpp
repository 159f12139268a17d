#pragma once

#include <audiobook/orchestrator/project.hpp>

#include <filesystem>
#include <string>

namespace fixtures {

std::filesystem::path source_dir();
std::filesystem::path demo_project_path();
std::filesystem::path fixture_path(const std::string& name);
// The stretch_narrator test adapter.
std::filesystem::path stretch_narrator_path();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Demo script and assets narrated by stretch_narrator at `factor`. The
// project file is written into `dir` so adapter output lands there too.
audiobook::Project stretch_project(const std::filesystem::path& dir, double factor);

// Demo project with the door cue placed 80 ms late and the rain bed 6 dB hot.
audiobook::Project correction_project();

}  // namespace fixtures
