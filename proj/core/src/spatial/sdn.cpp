#include "audiobook/spatial/sdn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "audiobook/audio/convolve.hpp"
#include "audiobook/spatial/ambisonics.hpp"

namespace audiobook {
namespace {

constexpr int kWalls = 6;
constexpr int kNeighbours = kWalls - 1;

double& axis(Vec3& v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; }
double axis(const Vec3& v, int a) { return a == 0 ? v.x : a == 1 ? v.y : v.z; }

double dist(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

class DelayLine {
 public:
  explicit DelayLine(std::size_t delay) : buf_(std::max<std::size_t>(delay, 1), 0.0) {}
  // Returns the value written `delay` calls ago, then stores x.
  double exchange(double x) {
    const double y = buf_[pos_];
    buf_[pos_] = x;
    pos_ = pos_ + 1 == buf_.size() ? 0 : pos_ + 1;
    return y;
  }

 private:
  std::vector<double> buf_;
  std::size_t pos_ = 0;
};

std::size_t delay_samples(double meters, int rate) {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(meters / kSpeedOfSound * rate)));
}

// Constant-power pan from the azimuth of `p` seen from the listener.
std::array<double, 2> pan(const Vec3& p, const Vec3& listener) {
  const double az = std::atan2(p.y - listener.y, p.x - listener.x);
  const double theta = (1.0 - std::sin(az)) * std::numbers::pi / 4.0;
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace

void RoomModel::validate() const {
  for (int a = 0; a < 3; ++a) {
    const double L = axis(dimensions, a);
    if (!(L > 0.0)) throw std::invalid_argument("room dimensions must be positive");
    if (!(axis(source, a) > 0.0 && axis(source, a) < L)) throw std::invalid_argument("source must be strictly inside the room");
    if (!(axis(listener, a) > 0.0 && axis(listener, a) < L)) throw std::invalid_argument("listener must be strictly inside the room");
  }
  for (double al : absorption) {
    if (!(al > 0.0 && al <= 1.0)) throw std::invalid_argument("wall absorption must be in (0, 1]");
  }
}

std::vector<std::vector<double>> sdn_scattering_matrix() {
  std::vector<std::vector<double>> s(kNeighbours, std::vector<double>(kNeighbours, 2.0 / kNeighbours));
  for (int i = 0; i < kNeighbours; ++i) s[i][i] -= 1.0;
  return s;
}

ImpulseResponse sdn_impulse_response(const RoomModel& room, int rate, const SdnOptions& opt) {
  room.validate();
  if (rate <= 0) throw std::invalid_argument("sdn: rate must be positive");
  const Vec3& S = room.source;
  const Vec3& M = room.listener;

  std::array<Vec3, kWalls> node;
  for (int w = 0; w < kWalls; ++w) {
    const int a = w / 2;
    const double plane = (w % 2 == 0) ? 0.0 : axis(room.dimensions, a);
    Vec3 image = S;
    axis(image, a) = 2.0 * plane - axis(S, a);
    const double t = (plane - axis(M, a)) / (axis(image, a) - axis(M, a));
    node[w] = {M.x + t * (image.x - M.x), M.y + t * (image.y - M.y), M.z + t * (image.z - M.z)};
  }

  std::array<double, kWalls> g_src{}, g_mic{}, beta{};
  std::vector<DelayLine> src_line, mic_line;
  std::array<std::array<double, 2>, kWalls> node_pan{};
  for (int k = 0; k < kWalls; ++k) {
    const double dsk = std::max(dist(S, node[k]), 1e-3);
    const double dkm = dist(node[k], M);
    g_src[k] = 1.0 / dsk;
    g_mic[k] = 1.0 / (1.0 + dkm / dsk);
    beta[k] = std::sqrt(1.0 - room.absorption[static_cast<std::size_t>(k)]);
    src_line.emplace_back(delay_samples(dsk, rate));
    mic_line.emplace_back(delay_samples(dkm, rate));
    node_pan[k] = pan(node[k], M);
  }
  // links[k][i]: line carrying the wave from node k toward its i-th neighbour.
  std::vector<std::vector<DelayLine>> links(kWalls);
  std::array<std::array<int, kNeighbours>, kWalls> neighbour{};
  std::array<std::array<int, kNeighbours>, kWalls> slot_at_neighbour{};
  for (int k = 0; k < kWalls; ++k) {
    int i = 0;
    for (int j = 0; j < kWalls; ++j) {
      if (j == k) continue;
      neighbour[k][i] = j;
      links[k].emplace_back(delay_samples(dist(node[k], node[j]), rate));
      ++i;
    }
  }
  for (int k = 0; k < kWalls; ++k) {
    for (int i = 0; i < kNeighbours; ++i) {
      const int j = neighbour[k][i];
      slot_at_neighbour[k][i] = k < j ? k : k - 1;  // index of k among j's neighbours
    }
  }

  const double d_direct = std::max(dist(S, M), 1e-3);
  DelayLine direct(delay_samples(d_direct, rate));
  const double g_direct = 1.0 / d_direct;
  const auto direct_pan = pan(S, M);

  const auto total = static_cast<std::size_t>(std::ceil(opt.max_seconds * rate));
  std::vector<std::vector<double>> ir(2, std::vector<double>(total, 0.0));
  std::array<std::array<double, kNeighbours>, kWalls> incoming{};
  std::array<std::array<double, kNeighbours>, kWalls> outgoing{};
  constexpr double kScatter = 2.0 / kNeighbours;
  for (std::size_t n = 0; n < total; ++n) {
    const double input = n == 0 ? 1.0 : 0.0;
    for (int k = 0; k < kWalls; ++k) {
      for (int i = 0; i < kNeighbours; ++i) incoming[neighbour[k][i]][slot_at_neighbour[k][i]] = links[k][i].exchange(outgoing[k][i]);
    }
    double left = 0.0, right = 0.0;
    const double d = direct.exchange(input);
    if (opt.include_direct) {
      left += direct_pan[0] * g_direct * d;
      right += direct_pan[1] * g_direct * d;
    }
    for (int k = 0; k < kWalls; ++k) {
      const double src = 0.5 * g_src[k] * src_line[k].exchange(input);
      double sum = 0.0;
      for (int i = 0; i < kNeighbours; ++i) {
        incoming[k][i] += src;
        sum += incoming[k][i];
      }
      double out_sum = 0.0;
      for (int i = 0; i < kNeighbours; ++i) {
        outgoing[k][i] = beta[k] * (kScatter * sum - incoming[k][i]);
        out_sum += outgoing[k][i];
      }
      const double m = mic_line[k].exchange(g_mic[k] * kScatter * out_sum);
      left += node_pan[k][0] * m;
      right += node_pan[k][1] * m;
    }
    ir[0][n] = left;
    ir[1][n] = right;
  }

  double peak = 0.0;
  for (const auto& ch : ir) {
    for (double v : ch) peak = std::max(peak, std::abs(v));
  }
  const double floor = peak * std::pow(10.0, opt.floor_db / 20.0);
  std::size_t keep = 1;
  for (const auto& ch : ir) {
    for (std::size_t i = ch.size(); i > 0; --i) {
      if (std::abs(ch[i - 1]) > floor) {
        keep = std::max(keep, i);
        break;
      }
    }
  }
  for (auto& ch : ir) ch.resize(keep);
  return ImpulseResponse(rate, std::move(ir));
}

AudioBuffer sdn_reverb(const AudioBuffer& dry, const RoomModel& room, const SdnOptions& opt) {
  if (dry.channel_count() != 1) throw std::invalid_argument("sdn_reverb needs a mono input");
  return convolve(dry, sdn_impulse_response(room, dry.sample_rate(), opt));
}

}  // namespace audiobook
