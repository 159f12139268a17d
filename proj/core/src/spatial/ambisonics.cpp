#include "audiobook/spatial/ambisonics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace audiobook {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_order(int order) {
  if (order < 1 || order > kMaxAmbisonicOrder) {
    throw std::invalid_argument("ambisonic order must be 1.." + std::to_string(kMaxAmbisonicOrder));
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Associated Legendre P_n^m(x), m >= 0, without the (-1)^m phase.
double legendre(int n, int m, double x) {
  double pmm = 1.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * s;
  if (n == m) return pmm;
  double pm1 = x * (2.0 * m + 1.0) * pmm;
  if (n == m + 1) return pm1;
  double pn = 0.0;
  for (int l = m + 2; l <= n; ++l) {
    pn = ((2.0 * l - 1.0) * x * pm1 - (l + m - 1.0) * pmm) / (l - m);
    pmm = pm1;
    pm1 = pn;
  }
  return pn;
}

double wrap_deg(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0) a += 360.0;
  return a - 180.0;
}

// Sampled impulse response of a first-order IIR b0 + b1 z^-1 / (1 + a1 z^-1).
struct FirstOrder {
  double b0 = 1, b1 = 0, a1 = 0;
  double x1 = 0, y1 = 0;
  double process(double x) {
    const double y = b0 * x + b1 * x1 - a1 * y1;
    x1 = x;
    y1 = y;
    return y;
  }
};

// Spherical-head shadow: H(s) = (1 + alpha s / 2w0) / (1 + s / 2w0),
// w0 = c / a, bilinear-transformed. alpha falls from 2 at the ear to 0.1
// at 150 degrees and stays there.
FirstOrder head_shadow(double angle_to_ear_deg, double head_radius, double rate) {
  const double theta = std::min(std::abs(angle_to_ear_deg), 150.0);
  const double alpha = 1.05 + 0.95 * std::cos(theta / 150.0 * std::numbers::pi);
  const double w0 = kSpeedOfSound / head_radius;
  const double tau_k = 2.0 * rate / (2.0 * w0);
  FirstOrder f;
  const double a0 = 1.0 + tau_k;
  f.b0 = (1.0 + alpha * tau_k) / a0;
  f.b1 = (1.0 - alpha * tau_k) / a0;
  f.a1 = (1.0 - tau_k) / a0;
  return f;
}

// Windowed-sinc fractional delay: 32 taps, Kaiser beta 8, 1024 phases.
class FractionalDelay {
 public:
  static constexpr int kHalf = 16;
  static constexpr int kPhases = 1024;

  static const FractionalDelay& instance() {
    static const FractionalDelay fd;
    return fd;
  }

  // Value of x at fractional position p (taps outside x read as zero).
  double read(const std::vector<double>& x, double p) const {
    const double fl = std::floor(p);
    auto phase = static_cast<int>(std::lround((p - fl) * kPhases));
    auto base = static_cast<long long>(fl);
    if (phase == kPhases) {
      phase = 0;
      ++base;
    }
    const double* taps = &table_[static_cast<std::size_t>(phase) * 2 * kHalf];
    double acc = 0.0;
    const auto n = static_cast<long long>(x.size());
    for (int j = -kHalf + 1; j <= kHalf; ++j) {
      const long long i = base + j;
      if (i >= 0 && i < n) acc += x[static_cast<std::size_t>(i)] * taps[j + kHalf - 1];
    }
    return acc;
  }

 private:
  FractionalDelay() : table_(static_cast<std::size_t>(kPhases) * 2 * kHalf) {
    constexpr double beta = 8.0;
    const auto i0 = [](double v) {
      double sum = 1.0, term = 1.0;
      for (int k = 1; k < 50; ++k) {
        term *= (v * v / 4.0) / (static_cast<double>(k) * k);
        sum += term;
      }
      return sum;
    };
    const double norm = i0(beta);
    for (int ph = 0; ph < kPhases; ++ph) {
      const double mu = static_cast<double>(ph) / kPhases;
      double* taps = &table_[static_cast<std::size_t>(ph) * 2 * kHalf];
      double sum = 0.0;
      for (int j = -kHalf + 1; j <= kHalf; ++j) {
        const double u = j - mu;
        const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
        const double r = u / kHalf;
        const double w = std::abs(r) < 1.0 ? i0(beta * std::sqrt(1.0 - r * r)) / norm : 0.0;
        taps[j + kHalf - 1] = sinc * w;
        sum += sinc * w;
      }
      for (int j = 0; j < 2 * kHalf; ++j) taps[j] /= sum;
    }
  }
  std::vector<double> table_;
};

}  // namespace

std::vector<double> sh_gains(double azimuth_deg, double elevation_deg, int order) {
  check_order(order);
  const double az = azimuth_deg * kDeg;
  const double sin_el = std::sin(elevation_deg * kDeg);
  std::vector<double> g(static_cast<std::size_t>((order + 1) * (order + 1)));
  for (int n = 0; n <= order; ++n) {
    for (int m = -n; m <= n; ++m) {
      const int am = std::abs(m);
      const double norm = std::sqrt((m == 0 ? 1.0 : 2.0) * factorial(n - am) / factorial(n + am));
      const double trig = m >= 0 ? std::cos(am * az) : std::sin(am * az);
      g[static_cast<std::size_t>(n * (n + 1) + m)] = norm * legendre(n, am, sin_el) * trig;
    }
  }
  return g;
}

AmbisonicBuffer hoa_encode(const AudioBuffer& mono, double azimuth_deg, double elevation_deg, int order) {
  check_order(order);
  if (mono.channel_count() != 1) throw std::invalid_argument("hoa_encode needs a mono buffer");
  const auto g = sh_gains(azimuth_deg, elevation_deg, order);
  AmbisonicBuffer a;
  a.order = order;
  a.sample_rate = mono.sample_rate();
  const auto x = mono.channel(0);
  for (double gk : g) {
    std::vector<double> ch(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ch[i] = gk * x[i];
    a.channels.push_back(std::move(ch));
  }
  return a;
}

AmbisonicBuffer hoa_encode_moving(const AudioBuffer& mono, const std::vector<Direction>& directions, int order) {
  check_order(order);
  if (mono.channel_count() != 1) throw std::invalid_argument("hoa_encode_moving needs a mono buffer");
  if (directions.empty()) throw std::invalid_argument("hoa_encode_moving needs at least one direction");
  const auto x = mono.channel(0);
  const std::size_t nch = static_cast<std::size_t>((order + 1) * (order + 1));
  AmbisonicBuffer a;
  a.order = order;
  a.sample_rate = mono.sample_rate();
  a.channels.assign(nch, std::vector<double>(x.size(), 0.0));
  std::vector<std::vector<double>> gains;
  for (const auto& d : directions) gains.push_back(sh_gains(d.azimuth_deg, d.elevation_deg, order));
  for (std::size_t start = 0, b = 0; start < x.size(); start += kDirectionBlock, ++b) {
    const auto& g0 = gains[std::min(b, gains.size() - 1)];
    const auto& g1 = gains[std::min(b + 1, gains.size() - 1)];
    const std::size_t end = std::min(x.size(), start + kDirectionBlock);
    for (std::size_t i = start; i < end; ++i) {
      const double u = static_cast<double>(i - start) / kDirectionBlock;
      for (std::size_t k = 0; k < nch; ++k) a.channels[k][i] = (g0[k] + u * (g1[k] - g0[k])) * x[i];
    }
  }
  return a;
}

double woodworth_ear_delay(double azimuth_deg, double ear_azimuth_deg, double head_radius) {
  const double gamma = std::abs(wrap_deg(azimuth_deg - ear_azimuth_deg)) * kDeg;
  const double k = head_radius / kSpeedOfSound;
  if (gamma < std::numbers::pi / 2) return k * (1.0 - std::cos(gamma));
  return k * (1.0 + gamma - std::numbers::pi / 2);
}

double woodworth_itd(double lateral_deg, double head_radius) {
  const double t = lateral_deg * kDeg;
  return head_radius * (t + std::sin(t)) / kSpeedOfSound;
}

AudioBuffer hoa_decode(const AmbisonicBuffer& ambi, const ListenerProfile& profile, const DecoderOptions& opt) {
  check_order(ambi.order);
  const std::size_t nch = static_cast<std::size_t>((ambi.order + 1) * (ambi.order + 1));
  if (ambi.channels.size() != nch) throw std::invalid_argument("ambisonic channel count does not match order");
  if (!(profile.head_radius >= 0.06 && profile.head_radius <= 0.12)) {
    throw std::invalid_argument("head radius must be within 0.06..0.12 m");
  }
  const std::size_t n = ambi.frames();
  const auto S = static_cast<std::size_t>(opt.speakers);
  const double rate = ambi.sample_rate;
  std::vector<double> spk_az(S);
  for (std::size_t s = 0; s < S; ++s) spk_az[s] = wrap_deg(360.0 * static_cast<double>(s) / static_cast<double>(S));

  // Sampling decoder.
  std::vector<std::vector<double>> feed(S, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < S; ++s) {
    const auto y = sh_gains(spk_az[s], 0.0, ambi.order);
    for (std::size_t k = 0; k < nch; ++k) {
      const double d = y[k] / static_cast<double>(S);
      if (d == 0.0) continue;
      const auto& a = ambi.channels[k];
      for (std::size_t i = 0; i < n; ++i) feed[s][i] += d * a[i];
    }
  }

  const bool binaural = profile.mode == PlaybackMode::kBinaural;
  const double ear_az[2] = {90.0, -90.0};
  std::vector<std::vector<double>> ear(2, std::vector<double>(n, 0.0));
  // Path gram matrix over both ears: M[s][t] = sum_e <h_se, h_te>.
  std::vector<std::vector<double>> gram(S, std::vector<double>(S, 0.0));
  if (binaural) {
    std::vector<std::vector<std::vector<double>>> ir(2, std::vector<std::vector<double>>(S));
    for (int e = 0; e < 2; ++e) {
      for (std::size_t s = 0; s < S; ++s) {
        FirstOrder f = head_shadow(wrap_deg(spk_az[s] - ear_az[e]), profile.head_radius, rate);
        FirstOrder probe = f;
        ir[e][s].resize(opt.path_ir_taps);
        for (std::size_t i = 0; i < opt.path_ir_taps; ++i) ir[e][s][i] = probe.process(i == 0 ? 1.0 : 0.0);
        for (std::size_t i = 0; i < n; ++i) ear[e][i] += f.process(feed[s][i]);
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t t = 0; t < S; ++t) {
        double acc = 0.0;
        for (int e = 0; e < 2; ++e) {
          for (std::size_t i = 0; i < opt.path_ir_taps; ++i) acc += ir[e][s][i] * ir[e][t][i];
        }
        gram[s][t] = acc;
      }
    }
  } else {
    const double tan30 = std::tan(30.0 * kDeg);
    std::vector<double> gl(S), gr(S);
    for (std::size_t s = 0; s < S; ++s) {
      const double folded = std::asin(std::sin(spk_az[s] * kDeg));
      const double clamped = std::clamp(folded, -30.0 * kDeg, 30.0 * kDeg);
      const double r = std::tan(clamped) / tan30;
      const double norm = std::sqrt((1 + r) * (1 + r) + (1 - r) * (1 - r));
      gl[s] = (1 + r) / norm;
      gr[s] = (1 - r) / norm;
      for (std::size_t i = 0; i < n; ++i) {
        ear[0][i] += gl[s] * feed[s][i];
        ear[1][i] += gr[s] * feed[s][i];
      }
    }
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t t = 0; t < S; ++t) gram[s][t] = gl[s] * gl[t] + gr[s] * gr[t];
    }
  }
  double mean_diag = 0.0;
  for (std::size_t s = 0; s < S; ++s) mean_diag += gram[s][s];
  mean_diag /= static_cast<double>(S);

  // Per-block energy normalization and (binaural) ear delays.
  const std::size_t blocks = (n + opt.block - 1) / opt.block;
  std::vector<double> gain(blocks, 1.0);
  std::vector<std::array<double, 2>> delay(blocks, {0.0, 0.0});
  double g_prev = 1.0;
  std::array<double, 2> d_prev{0.0, 0.0};
  bool have_prev = false;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t start = b * opt.block;
    const std::size_t end = std::min(n, start + opt.block);
    std::vector<std::vector<double>> q(S, std::vector<double>(S, 0.0));
    for (std::size_t s = 0; s < S; ++s) {
      for (std::size_t t = s; t < S; ++t) {
        double acc = 0.0;
        for (std::size_t i = start; i < end; ++i) acc += feed[s][i] * feed[t][i];
        q[s][t] = q[t][s] = acc;
      }
    }
    double trace = 0.0, weighted = 0.0, ex = 0.0, ey = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      trace += q[s][s];
      ex += q[s][s] * std::cos(spk_az[s] * kDeg);
      ey += q[s][s] * std::sin(spk_az[s] * kDeg);
      for (std::size_t t = 0; t < S; ++t) weighted += q[s][t] * gram[s][t];
    }
    if (trace > 1e-24 && weighted > 0.0) {
      g_prev = std::sqrt(trace * mean_diag / weighted);
      if (binaural) {
        const double az = std::atan2(ey, ex) / kDeg;
        for (int e = 0; e < 2; ++e) d_prev[e] = woodworth_ear_delay(az, ear_az[e], profile.head_radius) * rate;
      }
      if (!have_prev) {
        // Leading silent blocks take the first measured values.
        for (std::size_t k = 0; k < b; ++k) {
          gain[k] = g_prev;
          delay[k] = d_prev;
        }
        have_prev = true;
      }
    }
    gain[b] = g_prev;
    delay[b] = d_prev;
  }

  const std::size_t out_len = n + kDecodeTail;
  std::vector<std::vector<double>> scaled(2, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = i / opt.block;
    const double u = static_cast<double>(i - b * opt.block) / static_cast<double>(opt.block);
    const double g0 = b == 0 ? gain[0] : gain[b - 1];
    const double g = g0 + u * (gain[b] - g0);
    scaled[0][i] = g * ear[0][i];
    scaled[1][i] = g * ear[1][i];
  }
  std::vector<std::vector<double>> out(2, std::vector<double>(out_len, 0.0));
  if (!binaural) {
    for (int e = 0; e < 2; ++e) std::copy(scaled[e].begin(), scaled[e].end(), out[e].begin());
    return AudioBuffer(ambi.sample_rate, std::move(out));
  }
  const auto& fd = FractionalDelay::instance();
  for (int e = 0; e < 2; ++e) {
    for (std::size_t i = 0; i < out_len; ++i) {
      const std::size_t b = std::min(i / opt.block, blocks == 0 ? 0 : blocks - 1);
      if (blocks == 0) break;
      const double u = std::min(1.0, static_cast<double>(i - b * opt.block) / static_cast<double>(opt.block));
      const double d0 = b == 0 ? delay[0][e] : delay[b - 1][e];
      const double d = d0 + u * (delay[b][e] - d0);
      out[e][i] = fd.read(scaled[e], static_cast<double>(i) - d);
    }
  }
  return AudioBuffer(ambi.sample_rate, std::move(out));
}

}  // namespace audiobook
