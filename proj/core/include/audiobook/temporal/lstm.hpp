#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "audiobook/script/types.hpp"

namespace audiobook {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// Hidden size h, input size d: every W is h x d, every U is h x h and every
// b has h entries.
struct LstmWeights {
  std::size_t hidden = 0;
  std::size_t input = 0;
  Matrix W_f, W_i, W_o, W_c;
  Matrix U_f, U_i, U_o, U_c;
  std::vector<double> b_f, b_i, b_o, b_c;

  static LstmWeights zeros(std::size_t hidden, std::size_t input);
  // Entries uniform in [-scale, scale].
  static LstmWeights random(std::size_t hidden, std::size_t input, std::uint64_t seed, double scale = 0.5);

  // Text format, version-tagged:
  //   LSTMW 1
  //   dims <h> <d>
  //   <name> <rows> <cols>     then rows of numbers, for W_* and U_*
  //   <name> <n>               then one row, for b_*
  // in the order W_f W_i W_o W_c U_f U_i U_o U_c b_f b_i b_o b_c.
  // Lines starting with '#' are ignored.
  static LstmWeights parse(std::string_view text);
  static const LstmWeights& builtin();
  std::string serialize() const;

  // Throws std::invalid_argument on inconsistent shapes.
  void validate() const;
  // Visits every parameter in the file order.
  void for_each_parameter(const std::function<void(double&)>& fn);
  std::size_t parameter_count() const;

  friend bool operator==(const LstmWeights&, const LstmWeights&) = default;
};

using Sequence = std::vector<std::vector<double>>;

// h_t for t = 1..T with h_0 = c_0 = 0.
Sequence lstm_forward(const Sequence& xs, const LstmWeights& w);

// Loss sum_t sum_k h_t[k]^2.
double lstm_loss(const Sequence& xs, const LstmWeights& w);

// Gradient of lstm_loss by backpropagation through time, in the shape of
// the weights.
LstmWeights lstm_gradient(const Sequence& xs, const LstmWeights& w);

// Max over parameters of |g_analytic - g_numeric| / max(|g_analytic| +
// |g_numeric|, 1e-6), with central differences of step eps.
double lstm_grad_check(const LstmWeights& w, const Sequence& xs, double eps = 1e-5);

// Per-segment features: cue density (cues per word), sentiment, dialogue
// flag, speaker change from the previous segment.
Sequence transition_features(const ScriptDoc& doc);

// Score in [0, 1] per segment: (1 + mean_k h_t[k]) / 2.
std::vector<double> transition_scores(const ScriptDoc& doc, const LstmWeights& w = LstmWeights::builtin());

// Pause before segment t (t >= 1): 0.4 + 0.6 * score seconds.
double transition_pause_s(double score);

}  // namespace audiobook
