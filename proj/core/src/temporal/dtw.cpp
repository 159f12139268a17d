#include "audiobook/temporal/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace audiobook {

void FeatureSeries::validate() const {
  if (!(hop_s > 0.0) || !std::isfinite(hop_s)) throw std::invalid_argument("feature series hop must be positive");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("feature series contains a non-finite value");
  }
}

DtwMetric parse_dtw_metric(std::string_view name) {
  if (name == "abs") return DtwMetric::kAbs;
  if (name == "squared") return DtwMetric::kSquared;
  throw std::invalid_argument("unknown DTW metric '" + std::string(name) + "'");
}

WarpPath dtw_align(std::span<const double> x, std::span<const double> y, const DtwOptions& options) {
  if (x.empty() || y.empty()) throw std::invalid_argument("dtw_align: empty input");
  const std::size_t n = x.size(), m = y.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto allowed = [&](std::size_t i, std::size_t j) {
    if (!options.band) return true;
    const double centre = n == 1 ? 0.0 : static_cast<double>(i) * static_cast<double>(m - 1) / static_cast<double>(n - 1);
    return std::abs(static_cast<double>(j) - centre) <= static_cast<double>(*options.band);
  };
  auto local = [&](std::size_t i, std::size_t j) {
    const double d = x[i] - y[j];
    return options.metric == DtwMetric::kAbs ? std::abs(d) : d * d;
  };

  // step: 0 diagonal, 1 from (i-1,j), 2 from (i,j-1)
  std::vector<double> cost(n * m, kInf);
  std::vector<unsigned char> step(n * m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!allowed(i, j)) continue;
      const std::size_t at = i * m + j;
      if (i == 0 && j == 0) {
        cost[at] = local(0, 0);
        continue;
      }
      double best = kInf;
      unsigned char choice = 0;
      if (i > 0 && j > 0 && cost[at - m - 1] < best) {
        best = cost[at - m - 1];
        choice = 0;
      }
      if (i > 0 && cost[at - m] < best) {
        best = cost[at - m];
        choice = 1;
      }
      if (j > 0 && cost[at - 1] < best) {
        best = cost[at - 1];
        choice = 2;
      }
      if (best == kInf) continue;
      cost[at] = best + local(i, j);
      step[at] = choice;
    }
  }
  if (cost.back() == kInf) throw std::invalid_argument("dtw_align: band too narrow to connect the endpoints");

  WarpPath path;
  path.cost = cost.back();
  std::size_t i = n - 1, j = m - 1;
  path.pairs.emplace_back(i, j);
  while (i > 0 || j > 0) {
    switch (step[i * m + j]) {
      case 0: --i, --j; break;
      case 1: --i; break;
      default: --j; break;
    }
    path.pairs.emplace_back(i, j);
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

WarpPath dtw_align(const FeatureSeries& x, const FeatureSeries& y, const DtwOptions& options) {
  x.validate();
  y.validate();
  return dtw_align(std::span<const double>(x.values), std::span<const double>(y.values), options);
}

void check_warp_path(const WarpPath& path, std::size_t n, std::size_t m) {
  if (path.pairs.empty()) throw std::logic_error("warp path is empty");
  if (path.pairs.front() != std::pair<std::size_t, std::size_t>{0, 0}) throw std::logic_error("warp path must start at (0,0)");
  if (path.pairs.back() != std::pair<std::size_t, std::size_t>{n - 1, m - 1}) throw std::logic_error("warp path must end at (n-1,m-1)");
  for (std::size_t k = 1; k < path.pairs.size(); ++k) {
    const auto [pi, pj] = path.pairs[k - 1];
    const auto [ci, cj] = path.pairs[k];
    const std::size_t di = ci - pi, dj = cj - pj;
    const bool ok = ci >= pi && cj >= pj && di <= 1 && dj <= 1 && (di + dj) > 0;
    if (!ok) throw std::logic_error("warp path step " + std::to_string(k) + " is not monotone and continuous");
  }
}

double warp_position(const WarpPath& path, double x_position) {
  if (path.pairs.empty()) throw std::invalid_argument("warp_position: empty path");
  const std::size_t n = path.pairs.back().first + 1;
  std::vector<double> sum(n, 0.0), count(n, 0.0);
  for (const auto& [i, j] : path.pairs) {
    sum[i] += static_cast<double>(j);
    count[i] += 1.0;
  }
  auto mapped = [&](std::size_t i) { return sum[i] / count[i]; };
  if (x_position <= 0.0) return mapped(0);
  if (x_position >= static_cast<double>(n - 1)) return mapped(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(x_position));
  const double u = x_position - static_cast<double>(lo);
  return mapped(lo) + u * (mapped(lo + 1) - mapped(lo));
}

}  // namespace audiobook
