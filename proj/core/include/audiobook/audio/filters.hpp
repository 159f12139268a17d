#pragma once

#include <span>

namespace audiobook {

// Direct form I biquad with RBJ cookbook designs.
class Biquad {
 public:
  static Biquad lowpass(double rate, double cutoff_hz, double q = 0.7071067811865476);
  static Biquad highpass(double rate, double cutoff_hz, double q = 0.7071067811865476);
  static Biquad bandpass(double rate, double center_hz, double q);

  double process(double x) {
    const double y = b0_ * x + b1_ * x1_ + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
    x2_ = x1_;
    x1_ = x;
    y2_ = y1_;
    y1_ = y;
    return y;
  }
  void process(std::span<double> samples) {
    for (double& s : samples) s = process(s);
  }
  void reset() { x1_ = x2_ = y1_ = y2_ = 0.0; }
  // Takes the coefficients of `other`, keeping this filter's state.
  void retune(const Biquad& other) {
    b0_ = other.b0_;
    b1_ = other.b1_;
    b2_ = other.b2_;
    a1_ = other.a1_;
    a2_ = other.a2_;
  }

 private:
  Biquad(double b0, double b1, double b2, double a0, double a1, double a2);
  double b0_, b1_, b2_, a1_, a2_;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

// y[n] = y[n-1] + a (x[n] - y[n-1]), a = 1 - exp(-2 pi fc / rate).
class OnePoleLowpass {
 public:
  OnePoleLowpass(double rate, double cutoff_hz);
  double process(double x) {
    state_ += coeff_ * (x - state_);
    return state_;
  }
  void set_cutoff(double rate, double cutoff_hz);
  double coefficient() const { return coeff_; }

 private:
  double coeff_ = 1.0;
  double state_ = 0.0;
};

}  // namespace audiobook
