#include "audiobook/audio/filters.hpp"

#include <cmath>
#include <numbers>

namespace audiobook {

Biquad::Biquad(double b0, double b1, double b2, double a0, double a1, double a2)
    : b0_(b0 / a0), b1_(b1 / a0), b2_(b2 / a0), a1_(a1 / a0), a2_(a2 / a0) {}

Biquad Biquad::lowpass(double rate, double cutoff_hz, double q) {
  const double w = 2.0 * std::numbers::pi * cutoff_hz / rate;
  const double alpha = std::sin(w) / (2.0 * q);
  const double c = std::cos(w);
  return Biquad((1 - c) / 2, 1 - c, (1 - c) / 2, 1 + alpha, -2 * c, 1 - alpha);
}

Biquad Biquad::highpass(double rate, double cutoff_hz, double q) {
  const double w = 2.0 * std::numbers::pi * cutoff_hz / rate;
  const double alpha = std::sin(w) / (2.0 * q);
  const double c = std::cos(w);
  return Biquad((1 + c) / 2, -(1 + c), (1 + c) / 2, 1 + alpha, -2 * c, 1 - alpha);
}

Biquad Biquad::bandpass(double rate, double center_hz, double q) {
  const double w = 2.0 * std::numbers::pi * center_hz / rate;
  const double alpha = std::sin(w) / (2.0 * q);
  const double c = std::cos(w);
  return Biquad(alpha, 0.0, -alpha, 1 + alpha, -2 * c, 1 - alpha);
}

OnePoleLowpass::OnePoleLowpass(double rate, double cutoff_hz) { set_cutoff(rate, cutoff_hz); }

void OnePoleLowpass::set_cutoff(double rate, double cutoff_hz) {
  coeff_ = 1.0 - std::exp(-2.0 * std::numbers::pi * cutoff_hz / rate);
}

}  // namespace audiobook
