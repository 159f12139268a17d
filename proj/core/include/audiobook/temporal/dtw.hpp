#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace audiobook {

// A sampled feature track, e.g. an energy envelope.
struct FeatureSeries {
  std::vector<double> values;
  double hop_s = 0.025;

  // Throws std::invalid_argument unless hop_s > 0 and all values are finite.
  void validate() const;
  double duration_s() const { return static_cast<double>(values.size()) * hop_s; }

  friend bool operator==(const FeatureSeries&, const FeatureSeries&) = default;
};

struct WarpPath {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;
};

enum class DtwMetric { kAbs, kSquared };

// "abs" or "squared"; throws std::invalid_argument otherwise.
DtwMetric parse_dtw_metric(std::string_view name);

struct DtwOptions {
  DtwMetric metric = DtwMetric::kAbs;
  // Sakoe-Chiba half width in cells around the rescaled diagonal. Must be
  // wide enough to connect the corners or dtw_align throws.
  std::optional<std::size_t> band;
};

// Minimum-cost monotone, continuous path from (0,0) to (n-1,m-1). When
// predecessors tie, the diagonal wins, then (i-1,j), then (i,j-1).
WarpPath dtw_align(std::span<const double> x, std::span<const double> y, const DtwOptions& options = {});
WarpPath dtw_align(const FeatureSeries& x, const FeatureSeries& y, const DtwOptions& options = {});

// Throws std::logic_error if the path breaks the endpoint or step rules.
void check_warp_path(const WarpPath& path, std::size_t n, std::size_t m);

// Maps a position on x (in steps, fractional allowed) to y by averaging the
// y indices paired with each x index and interpolating between neighbours.
double warp_position(const WarpPath& path, double x_position);

}  // namespace audiobook
