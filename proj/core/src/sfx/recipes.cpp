#include <algorithm>
#include <cmath>
#include <numbers>

#include "audiobook/audio/filters.hpp"
#include "audiobook/sfx/sfx.hpp"
#include "audiobook/util/rng.hpp"

namespace audiobook {
namespace {

using Samples = std::vector<double>;

double white(Rng& rng) { return 2.0 * rng.uniform() - 1.0; }

// High-passed white noise with sparse bright droplets.
void rain(Samples& x, Rng& rng, double rate) {
  Biquad hp1 = Biquad::highpass(rate, 2000.0);
  Biquad hp2 = Biquad::highpass(rate, 2000.0);
  double drop = 0.0;
  for (double& s : x) {
    if (rng.uniform() < 40.0 / rate) drop = 1.0;
    drop *= 0.995;
    s = hp2.process(hp1.process(white(rng) * (1.0 + 2.0 * drop)));
  }
}

// Leaky-integrated (brown) noise, low-passed twice at 200 Hz, with a few
// rolling swells.
void thunder(Samples& x, Rng& rng, double rate) {
  Biquad lp1 = Biquad::lowpass(rate, 200.0);
  Biquad lp2 = Biquad::lowpass(rate, 200.0);
  const double dur = static_cast<double>(x.size()) / rate;
  const double t0 = 0.05 * dur;
  const double swell = 0.3 + 0.3 * rng.uniform();
  double brown = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    brown = 0.998 * brown + 0.05 * white(rng);
    double env = t < t0 ? t / t0 : std::exp(-(t - t0) / (0.35 * dur));
    env *= 1.0 + swell * std::sin(2.0 * std::numbers::pi * 1.3 * t);
    x[i] = lp2.process(lp1.process(brown)) * env;
  }
}

// One decaying low thump every 1/kStepsPerSecond s, the first a quarter
// period in.
void footsteps(Samples& x, Rng& rng, double rate) {
  const double dur = static_cast<double>(x.size()) / rate;
  const auto steps = static_cast<long>(std::llround(dur * kStepsPerSecond));
  const auto burst = static_cast<std::size_t>(0.100 * rate);
  for (long k = 0; k < steps; ++k) {
    const auto start = static_cast<std::size_t>(std::llround((static_cast<double>(k) + 0.25) / kStepsPerSecond * rate));
    Biquad bp = Biquad::bandpass(rate, 350.0 + 100.0 * rng.uniform(), 1.2);
    Biquad click = Biquad::highpass(rate, 2500.0);
    const double level = 0.8 + 0.4 * rng.uniform();
    for (std::size_t i = 0; i < burst && start + i < x.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      const double n = white(rng);
      x[start + i] += level * std::exp(-t / 0.020) * (bp.process(n) + 0.3 * click.process(n));
    }
  }
}

// Creaking hinge for the first 70 %, then a slam.
void door(Samples& x, Rng& rng, double rate) {
  const std::size_t creak_end = x.size() * 7 / 10;
  const std::size_t slam = x.size() * 3 / 4;
  Biquad body = Biquad::bandpass(rate, 900.0, 3.0);
  double phase = 0.0;
  const double f_lo = 70.0 + 30.0 * rng.uniform();
  for (std::size_t i = 0; i < creak_end; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(creak_end);
    phase += (f_lo + 120.0 * std::sin(std::numbers::pi * u)) / rate;
    phase -= std::floor(phase);
    x[i] = 0.4 * body.process(2.0 * phase - 1.0) * std::sin(std::numbers::pi * u);
  }
  Biquad thud = Biquad::lowpass(rate, 300.0);
  for (std::size_t i = slam; i < x.size(); ++i) {
    const double t = static_cast<double>(i - slam) / rate;
    x[i] += 3.0 * thud.process(white(rng)) * std::exp(-t / 0.08);
  }
}

// Babble: band-limited noise voices with syllable-rate amplitude modulation.
void crowd(Samples& x, Rng& rng, double rate) {
  constexpr int kVoices = 12;
  for (int v = 0; v < kVoices; ++v) {
    Biquad bp = Biquad::bandpass(rate, 300.0 + 2200.0 * rng.uniform(), 2.0);
    const double syll = 3.0 + 3.0 * rng.uniform();
    const double ph = rng.uniform();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i) / rate;
      const double am = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * (syll * t + ph));
      x[i] += bp.process(white(rng)) * am * am;
    }
  }
}

// Low roar plus random bright crackles.
void fire(Samples& x, Rng& rng, double rate) {
  Biquad roar = Biquad::lowpass(rate, 800.0);
  Biquad crack = Biquad::highpass(rate, 1500.0);
  double pop = 0.0;
  for (double& s : x) {
    if (rng.uniform() < 15.0 / rate) pop = 0.5 + rng.uniform();
    pop *= 0.99;
    s = 0.3 * roar.process(white(rng)) + crack.process(white(rng) * pop);
  }
}

// Band-pass noise whose centre and level drift slowly.
void wind(Samples& x, Rng& rng, double rate) {
  const double lfo = 0.1 + 0.2 * rng.uniform();
  const double ph = rng.uniform();
  Biquad bp = Biquad::bandpass(rate, 600.0, 1.5);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = static_cast<double>(i) / rate;
    const double m = std::sin(2.0 * std::numbers::pi * (lfo * t + ph));
    if (i % 256 == 0) {
      Biquad next = Biquad::bandpass(rate, 600.0 + 300.0 * m, 1.5);
      bp.retune(next);
    }
    x[i] = bp.process(white(rng)) * (0.6 + 0.4 * m);
  }
}

}  // namespace

const std::vector<std::string>& recipe_events() {
  static const std::vector<std::string> e = {"crowd", "door", "fire", "footsteps", "rain", "thunder", "wind"};
  return e;
}

bool has_recipe(const std::string& event) {
  for (const auto& e : recipe_events()) {
    if (e == event) return true;
  }
  return false;
}

CueAudio synthesize_procedural(const std::string& event, double duration_s, std::uint64_t seed, int rate) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw std::invalid_argument("synthesize_procedural: duration must be positive");
  }
  if (rate <= 0) throw std::invalid_argument("synthesize_procedural: rate must be positive");
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate));
  Samples x(std::max<std::size_t>(n, 1), 0.0);
  Rng rng(seed);
  const double r = rate;
  if (event == "rain") {
    rain(x, rng, r);
  } else if (event == "thunder") {
    thunder(x, rng, r);
  } else if (event == "footsteps") {
    footsteps(x, rng, r);
  } else if (event == "door") {
    door(x, rng, r);
  } else if (event == "crowd") {
    crowd(x, rng, r);
  } else if (event == "fire") {
    fire(x, rng, r);
  } else if (event == "wind") {
    wind(x, rng, r);
  } else {
    throw UnknownEventError("no procedural recipe for event '" + event + "'");
  }
  finalize_cue_level(x, rate);
  CueAudio c;
  c.buffer = AudioBuffer::mono(rate, std::move(x));
  c.provenance = Provenance::kProcedural;
  c.seed = seed;
  return c;
}

}  // namespace audiobook
