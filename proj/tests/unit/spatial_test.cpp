#include <audiobook/orchestrator/project.hpp>
#include <audiobook/spatial/ambisonics.hpp>
#include <audiobook/spatial/environment.hpp>
#include <audiobook/spatial/propagation.hpp>
#include <audiobook/spatial/render.hpp>
#include <audiobook/spatial/sdn.hpp>

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace audiobook;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

AudioBuffer noise(double seconds, std::uint64_t seed = 1) {
  return AudioBuffer::mono(48000, oracle::white_noise(static_cast<std::size_t>(seconds * 48000), seed));
}

double spectral_centroid(const std::vector<double>& x) {
  // Direct DFT over one 2048-sample frame from the middle.
  std::vector<double> frame(x.begin() + static_cast<long>(x.size() / 2), x.begin() + static_cast<long>(x.size() / 2) + 2048);
  const auto spec = oracle::direct_dft(frame);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k <= 1024; ++k) {
    const double m = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    num += static_cast<double>(k) * m;
    den += m;
  }
  return num / den;
}

CueAudio cue_of(AudioBuffer b) {
  CueAudio c;
  c.cue_id = "c";
  c.buffer = std::move(b);
  return c;
}

}  // namespace

TEST(HoaEncode, FrontAndLeft) {
  const auto front = sh_gains(0.0, 0.0, 1);
  ASSERT_EQ(front.size(), 4u);
  EXPECT_NEAR(front[0], 1.0, 1e-15);
  EXPECT_NEAR(front[1], 0.0, 1e-15);
  EXPECT_NEAR(front[2], 0.0, 1e-15);
  EXPECT_NEAR(front[3], 1.0, 1e-15);
  const auto left = sh_gains(90.0, 0.0, 1);
  EXPECT_NEAR(left[0], 1.0, 1e-15);
  EXPECT_NEAR(left[1], 1.0, 1e-15);
  EXPECT_NEAR(left[2], 0.0, 1e-15);
  EXPECT_NEAR(left[3], 0.0, 1e-15);
}

TEST(HoaEncode, SecondOrderClosedForm) {
  const auto g = sh_gains(37.0, 12.0, 2);
  const auto ref = oracle::sh_order2(37.0, 12.0);
  ASSERT_EQ(g.size(), 9u);
  for (std::size_t k = 0; k < 9; ++k) EXPECT_NEAR(g[k], ref[k], 1e-9) << k;
}

TEST(HoaEncode, ThirdOrderHasSixteenChannelsAndUnitW) {
  const AudioBuffer x = noise(0.01);
  const AmbisonicBuffer a = hoa_encode(x, -120.0, 40.0, 3);
  ASSERT_EQ(a.channels.size(), 16u);
  EXPECT_EQ(a.channels[0], vec(x.channel(0)));
  // SN3D: the sum of squares of each degree equals the W gain squared.
  const auto g = sh_gains(-120.0, 40.0, 3);
  for (int l = 0; l <= 3; ++l) {
    double s = 0.0;
    for (int m = -l; m <= l; ++m) s += g[static_cast<std::size_t>(l * l + l + m)] * g[static_cast<std::size_t>(l * l + l + m)];
    EXPECT_NEAR(s, 1.0, 1e-12) << l;
  }
}

TEST(HoaEncode, OrderOutOfRange) {
  EXPECT_THROW(hoa_encode(noise(0.01), 0, 0, 0), std::invalid_argument);
  EXPECT_THROW(hoa_encode(noise(0.01), 0, 0, 4), std::invalid_argument);
}

TEST(HoaEncode, Linear) {
  const AudioBuffer x = noise(0.02, 3);
  std::vector<double> scaled = vec(x.channel(0));
  for (double& v : scaled) v *= 0.25;
  const AmbisonicBuffer a = hoa_encode(x, 33.0, -10.0, 2);
  const AmbisonicBuffer b = hoa_encode(AudioBuffer::mono(48000, scaled), 33.0, -10.0, 2);
  for (std::size_t c = 0; c < a.channels.size(); ++c)
    for (std::size_t i = 0; i < a.frames(); ++i) ASSERT_EQ(b.channels[c][i], 0.25 * a.channels[c][i]);
}

TEST(HoaDecode, SilenceStaysSilent) {
  const AudioBuffer out = hoa_decode(hoa_encode(AudioBuffer(48000, 1, 4800), 40.0, 0.0, 1), {});
  ASSERT_EQ(out.channel_count(), 2u);
  EXPECT_EQ(out.peak(), 0.0);
}

TEST(HoaDecode, LateralItdMatchesWoodworth) {
  const AudioBuffer x = noise(0.5, 17);
  const AudioBuffer out = hoa_decode(hoa_encode(x, 90.0, 0.0, 1), {});
  const int lag = oracle::xcorr_peak_lag(vec(out.channel(0)), vec(out.channel(1)), 60);
  const double expected = oracle::woodworth_itd_s(oracle::kPi / 2, 0.0875) * 48000.0;
  EXPECT_NEAR(expected, 31.48, 0.01);
  EXPECT_LE(std::fabs(lag - expected), 1.0);
}

TEST(HoaDecode, WoodworthHelpers) {
  EXPECT_NEAR(woodworth_itd(90.0, 0.0875), 0.0875 * (oracle::kPi / 2 + 1.0) / 343.0, 1e-15);
  EXPECT_NEAR(woodworth_itd(0.0, 0.0875), 0.0, 1e-15);
}

TEST(HoaDecode, EnergyFlatOverAzimuthSweep) {
  const AudioBuffer x = noise(0.25, 5);
  for (PlaybackMode mode : {PlaybackMode::kBinaural, PlaybackMode::kStereoSpeakers}) {
    ListenerProfile p;
    p.mode = mode;
    double lo = 1e300, hi = 0.0;
    for (int az = 0; az < 360; az += 15) {
      const AudioBuffer out = hoa_decode(hoa_encode(x, az, 0.0, 1), p);
      const double e = oracle::energy(vec(out.channel(0))) + oracle::energy(vec(out.channel(1)));
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    EXPECT_LE(10.0 * std::log10(hi / lo), 0.5) << to_string(mode);
  }
}

TEST(HoaDecode, GainsContinuousInAzimuth) {
  const AudioBuffer x = AudioBuffer::mono(48000, std::vector<double>(2048, 0.5));
  double prev_l = -1.0, prev_r = -1.0;
  for (int az = -180; az <= 180; ++az) {
    const AudioBuffer out = hoa_decode(hoa_encode(x, az, 0.0, 2), {});
    const double gl = oracle::rms(vec(out.channel(0))) / 0.5;
    const double gr = oracle::rms(vec(out.channel(1))) / 0.5;
    if (prev_l >= 0.0) {
      EXPECT_LT(std::fabs(gl - prev_l), 0.01) << az;
      EXPECT_LT(std::fabs(gr - prev_r), 0.01) << az;
    }
    prev_l = gl;
    prev_r = gr;
  }
}

TEST(Distance, UnitDistanceIsIdentity) {
  const AudioBuffer x = noise(0.1, 2);
  EXPECT_EQ(distance_attenuate(x, 1.0), x);
  EXPECT_EQ(distance_attenuate(x, 0.5), x);
}

TEST(Distance, TenMetresIsMinusTwentyDb) {
  const AudioBuffer tone = AudioBuffer::mono(48000, oracle::sine(50.0, 0.5, 1.0, 48000));
  const AudioBuffer out = distance_attenuate(tone, 10.0);
  // Skip the filter's settling at the start.
  const std::vector<double> in_tail(tone.channel(0).begin() + 4800, tone.channel(0).end());
  const std::vector<double> out_tail(out.channel(0).begin() + 4800, out.channel(0).end());
  EXPECT_NEAR(oracle::rms_db(out_tail) - oracle::rms_db(in_tail), -20.0, 0.1);
}

TEST(Distance, FartherIsDarker) {
  const AudioBuffer x = noise(0.2, 4);
  EXPECT_LT(spectral_centroid(vec(distance_attenuate(x, 20.0).channel(0))),
            spectral_centroid(vec(distance_attenuate(x, 2.0).channel(0))));
}

TEST(Doppler, ConstantDistanceIsPureDelay) {
  const double d = 5.0;
  const AudioBuffer tone = AudioBuffer::mono(48000, oracle::sine(100.0, 0.5, 0.5, 48000));
  const DopplerResult r = doppler_shift(tone, {{0.0, 0.0, 0.0, d}, {1.0, 0.0, 0.0, d}});
  const double delay = d / 343.0;
  double worst = 0.0;
  for (std::size_t i = 2000; i < 20000; ++i) {
    const double t = static_cast<double>(i) / 48000.0 - delay;
    worst = std::max(worst, std::fabs(r.audio.channel(0)[i] - 0.5 * std::sin(2.0 * oracle::kPi * 100.0 * t)));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Doppler, ApproachingAndReceding) {
  const AudioBuffer tone = AudioBuffer::mono(48000, oracle::sine(1000.0, 0.5, 2.0, 48000));
  // 34.3 m/s = 0.1 c.
  const DopplerResult in = doppler_shift(tone, {{0.0, 0.0, 0.0, 80.0}, {2.0, 0.0, 0.0, 80.0 - 68.6}});
  const DopplerResult out = doppler_shift(tone, {{0.0, 0.0, 0.0, 5.0}, {2.0, 0.0, 0.0, 5.0 + 68.6}});
  auto middle = [](const AudioBuffer& b, double t0, double t1) {
    return std::vector<double>(b.channel(0).begin() + static_cast<long>(t0 * 48000),
                               b.channel(0).begin() + static_cast<long>(t1 * 48000));
  };
  EXPECT_NEAR(oracle::peak_frequency(middle(in.audio, 0.5, 1.5), 48000, 1050, 1200), 1000.0 / 0.9, 2.0);
  EXPECT_NEAR(oracle::peak_frequency(middle(out.audio, 0.5, 1.5), 48000, 850, 950), 1000.0 / 1.1, 2.0);
}

TEST(Trajectory, Interpolation) {
  const std::vector<TrajectoryKey> k = {{0.0, 90.0, 0.0, 6.0}, {2.0, -90.0, 10.0, 2.0}};
  const TrajectoryKey mid = trajectory_at(k, 1.0);
  EXPECT_DOUBLE_EQ(mid.azimuth, 0.0);
  EXPECT_DOUBLE_EQ(mid.elevation, 5.0);
  EXPECT_DOUBLE_EQ(mid.distance, 4.0);
  EXPECT_DOUBLE_EQ(trajectory_at(k, 5.0).distance, 2.0);
  EXPECT_DOUBLE_EQ(trajectory_at(k, -1.0).azimuth, 90.0);
}

TEST(Sdn, ScatteringMatrixIsOrthogonal) {
  const auto S = sdn_scattering_matrix();
  ASSERT_EQ(S.size(), 5u);
  double worst = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(S[i][i], 2.0 / 5.0 - 1.0);
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 5; ++k) s += S[i][k] * S[j][k];
      worst = std::max(worst, std::fabs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(Sdn, FullAbsorptionLeavesOnlyEarlyPaths) {
  RoomModel room;
  room.absorption.fill(1.0);
  const ImpulseResponse ir = sdn_impulse_response(room, 48000);
  // First-order paths in a 5 x 4 x 3 m room arrive well within 60 ms.
  double early = 0.0, late = 0.0;
  for (const auto& ch : ir.taps)
    for (std::size_t i = 0; i < ch.size(); ++i) (i < 2880 ? early : late) += ch[i] * ch[i];
  EXPECT_GT(early, 0.0);
  EXPECT_LE(late, 1e-20 * early);
}

TEST(Sdn, Rt60FallsWithAbsorption) {
  double prev = 1e300;
  for (double a : {0.2, 0.4, 0.6, 0.8}) {
    RoomModel room;
    room.absorption.fill(a);
    const ImpulseResponse ir = sdn_impulse_response(room, 48000);
    std::vector<double> mono(ir.length());
    for (std::size_t i = 0; i < mono.size(); ++i) mono[i] = ir.taps[0][i] + ir.taps[1][i];
    const double rt = oracle::schroeder_rt60(mono, 48000);
    EXPECT_LT(rt, prev) << a;
    prev = rt;
  }
}

TEST(Sdn, LateEnergyDecays) {
  const std::vector<RoomModel> rooms = [] {
    RoomModel a, b, c;
    a.absorption.fill(0.05);
    b.dimensions = {8.0, 6.0, 3.5};
    b.absorption = {0.1, 0.3, 0.2, 0.05, 0.4, 0.1};
    b.source = {2.0, 4.5, 1.2};
    b.listener = {6.0, 2.0, 1.7};
    c.dimensions = {3.0, 3.0, 2.5};
    c.absorption.fill(0.5);
    c.source = {0.5, 2.5, 2.0};
    c.listener = {2.2, 0.8, 1.0};
    return std::vector<RoomModel>{a, b, c};
  }();
  for (const RoomModel& room : rooms) {
    SdnOptions opt;
    opt.max_seconds = 4.0;
    opt.floor_db = -300.0;
    const ImpulseResponse ir = sdn_impulse_response(room, 8000, opt);
    std::vector<double> e(ir.length());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = ir.taps[0][i] * ir.taps[0][i] + ir.taps[1][i] * ir.taps[1][i];
    // Energy in (t, t + 1 s] for t past a 100 ms mixing time.
    const std::size_t win = 8000, start = 800, step = 400;
    double prev = 1e300;
    for (std::size_t t = start; t + win <= e.size(); t += step) {
      double s = 0.0;
      for (std::size_t i = t; i < t + win; ++i) s += e[i];
      EXPECT_LE(s, prev * (1.0 + 1e-12));
      prev = s;
    }
  }
}

TEST(Sdn, RoomValidation) {
  RoomModel r;
  r.source = {6.0, 1.0, 1.0};
  EXPECT_THROW(r.validate(), std::invalid_argument);
  RoomModel a;
  a.absorption[2] = 0.0;
  EXPECT_THROW(a.validate(), std::invalid_argument);
}

TEST(Sdn, ReverbIsFiniteStereo) {
  const AudioBuffer wet = sdn_reverb(noise(0.05), RoomModel{});
  EXPECT_EQ(wet.channel_count(), 2u);
  EXPECT_TRUE(wet.all_finite());
}

TEST(Environment, BuiltinPresetsAndOverrides) {
  const auto& t = EnvironmentTable::builtin();
  for (const char* id : {"room", "hall", "outdoor", "cave"}) EXPECT_TRUE(t.contains(id)) << id;
  const auto o = t.with_overrides(nlohmann::json{{"room", {{"wet_ratio", 0.5}}}});
  EXPECT_EQ(o.at("room").wet_ratio, 0.5);
  EXPECT_EQ(o.at("room").absorption, t.at("room").absorption);
  EXPECT_THROW(t.with_overrides(nlohmann::json{{"room", {{"absorption", 0.0}}}}), std::invalid_argument);
}

TEST(RenderCue, DryStaticSourceIsEncodeThenDecode) {
  const AudioBuffer x = noise(0.2, 8);
  SpatialSpec spec;
  spec.azimuth = 0.0;
  spec.distance = 1.0;
  const RenderedCue r = render_cue(cue_of(x), spec, EnvironmentTable::builtin().at("dry"), {}, 3);
  EXPECT_EQ(r.audio, hoa_decode(hoa_encode(distance_attenuate(x, 1.0), 0.0, 0.0, 3), {}));
  EXPECT_EQ(r.latency_s, 0.0);
}

TEST(RenderCue, LeftSourceIsLouderLeft) {
  SpatialSpec spec;
  spec.azimuth = 90.0;
  const RenderedCue r = render_cue(cue_of(noise(0.3, 2)), spec, EnvironmentTable::builtin().at("room"), {}, 1);
  EXPECT_GT(oracle::rms(vec(r.audio.channel(0))), oracle::rms(vec(r.audio.channel(1))));
}

TEST(RenderCue, SweepFlipsInterauralLevelOnce) {
  SpatialSpec spec;
  spec.trajectory = {{0.0, 90.0, 0.0, 3.0}, {2.0, -90.0, 0.0, 3.0}};
  const RenderedCue r = render_cue(cue_of(noise(2.0, 6)), spec, EnvironmentTable::builtin().at("dry"), {}, 3);
  int flips = 0, prev_sign = 0;
  for (std::size_t b = 0; (b + 1) * kDirectionBlock <= r.audio.frames(); ++b) {
    double el = 0.0, er = 0.0;
    for (std::size_t i = b * kDirectionBlock; i < (b + 1) * kDirectionBlock; ++i) {
      el += r.audio.channel(0)[i] * r.audio.channel(0)[i];
      er += r.audio.channel(1)[i] * r.audio.channel(1)[i];
    }
    if (el + er < 1e-12) continue;
    const int sign = el > er ? 1 : (el < er ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) ++flips;
    prev_sign = sign;
  }
  EXPECT_EQ(flips, 1);
}

TEST(RenderCue, MovingSourceReportsLatency) {
  SpatialSpec spec;
  spec.trajectory = {{0.0, 0.0, 0.0, 6.86}, {1.0, 0.0, 0.0, 6.86}};
  const RenderedCue r = render_cue(cue_of(noise(0.5)), spec, EnvironmentTable::builtin().at("room"), {}, 1);
  EXPECT_DOUBLE_EQ(r.latency_s, 6.86 / 343.0);
  EXPECT_TRUE(r.audio.all_finite());
}
