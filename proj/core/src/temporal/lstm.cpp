#include "audiobook/temporal/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "audiobook/data.hpp"
#include "audiobook/util/rng.hpp"

namespace audiobook {
namespace {

double sigmoid(double a) { return 1.0 / (1.0 + std::exp(-a)); }

// a = W x + U h + b
std::vector<double> affine(const Matrix& W, const std::vector<double>& x, const Matrix& U, const std::vector<double>& h,
                           const std::vector<double>& b) {
  std::vector<double> a(b);
  for (std::size_t r = 0; r < W.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < W.cols; ++c) acc += W(r, c) * x[c];
    for (std::size_t c = 0; c < U.cols; ++c) acc += U(r, c) * h[c];
    a[r] += acc;
  }
  return a;
}

struct Step {
  std::vector<double> f, i, o, g, c, tanh_c, h;
};

std::vector<Step> run(const Sequence& xs, const LstmWeights& w) {
  w.validate();
  std::vector<double> h(w.hidden, 0.0), c(w.hidden, 0.0);
  std::vector<Step> steps;
  steps.reserve(xs.size());
  for (const auto& x : xs) {
    if (x.size() != w.input) throw std::invalid_argument("lstm: input vector has the wrong size");
    Step s;
    s.f = affine(w.W_f, x, w.U_f, h, w.b_f);
    s.i = affine(w.W_i, x, w.U_i, h, w.b_i);
    s.o = affine(w.W_o, x, w.U_o, h, w.b_o);
    s.g = affine(w.W_c, x, w.U_c, h, w.b_c);
    s.c.resize(w.hidden);
    s.tanh_c.resize(w.hidden);
    s.h.resize(w.hidden);
    for (std::size_t k = 0; k < w.hidden; ++k) {
      s.f[k] = sigmoid(s.f[k]);
      s.i[k] = sigmoid(s.i[k]);
      s.o[k] = sigmoid(s.o[k]);
      s.g[k] = std::tanh(s.g[k]);
      s.c[k] = s.f[k] * c[k] + s.i[k] * s.g[k];
      s.tanh_c[k] = std::tanh(s.c[k]);
      s.h[k] = s.o[k] * s.tanh_c[k];
    }
    h = s.h;
    c = s.c;
    steps.push_back(std::move(s));
  }
  return steps;
}

void check_matrix(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows != rows || m.cols != cols || m.data.size() != rows * cols) {
    throw std::invalid_argument(std::string("lstm weights: ") + name + " has the wrong shape");
  }
}

void check_vector(const std::vector<double>& v, std::size_t n, const char* name) {
  if (v.size() != n) throw std::invalid_argument(std::string("lstm weights: ") + name + " has the wrong size");
}

template <typename Fn>
void for_each_block(LstmWeights& w, Fn&& fn) {
  fn("W_f", &w.W_f, nullptr);
  fn("W_i", &w.W_i, nullptr);
  fn("W_o", &w.W_o, nullptr);
  fn("W_c", &w.W_c, nullptr);
  fn("U_f", &w.U_f, nullptr);
  fn("U_i", &w.U_i, nullptr);
  fn("U_o", &w.U_o, nullptr);
  fn("U_c", &w.U_c, nullptr);
  fn("b_f", nullptr, &w.b_f);
  fn("b_i", nullptr, &w.b_i);
  fn("b_o", nullptr, &w.b_o);
  fn("b_c", nullptr, &w.b_c);
}

std::vector<double*> parameter_pointers(LstmWeights& w) {
  std::vector<double*> out;
  w.for_each_parameter([&](double& p) { out.push_back(&p); });
  return out;
}

}  // namespace

LstmWeights LstmWeights::zeros(std::size_t hidden, std::size_t input) {
  if (hidden == 0 || input == 0) throw std::invalid_argument("lstm weights: dimensions must be positive");
  LstmWeights w;
  w.hidden = hidden;
  w.input = input;
  for (Matrix* m : {&w.W_f, &w.W_i, &w.W_o, &w.W_c}) *m = Matrix(hidden, input);
  for (Matrix* m : {&w.U_f, &w.U_i, &w.U_o, &w.U_c}) *m = Matrix(hidden, hidden);
  for (auto* b : {&w.b_f, &w.b_i, &w.b_o, &w.b_c}) b->assign(hidden, 0.0);
  return w;
}

LstmWeights LstmWeights::random(std::size_t hidden, std::size_t input, std::uint64_t seed, double scale) {
  LstmWeights w = zeros(hidden, input);
  Rng rng(seed);
  w.for_each_parameter([&](double& p) { p = rng.uniform(-scale, scale); });
  return w;
}

void LstmWeights::validate() const {
  if (hidden == 0 || input == 0) throw std::invalid_argument("lstm weights: dimensions must be positive");
  check_matrix(W_f, hidden, input, "W_f");
  check_matrix(W_i, hidden, input, "W_i");
  check_matrix(W_o, hidden, input, "W_o");
  check_matrix(W_c, hidden, input, "W_c");
  check_matrix(U_f, hidden, hidden, "U_f");
  check_matrix(U_i, hidden, hidden, "U_i");
  check_matrix(U_o, hidden, hidden, "U_o");
  check_matrix(U_c, hidden, hidden, "U_c");
  check_vector(b_f, hidden, "b_f");
  check_vector(b_i, hidden, "b_i");
  check_vector(b_o, hidden, "b_o");
  check_vector(b_c, hidden, "b_c");
}

void LstmWeights::for_each_parameter(const std::function<void(double&)>& fn) {
  for_each_block(*this, [&](const char*, Matrix* m, std::vector<double>* v) {
    for (double& p : m ? m->data : *v) fn(p);
  });
}

std::size_t LstmWeights::parameter_count() const { return 4 * hidden * (input + hidden + 1); }

LstmWeights LstmWeights::parse(std::string_view text) {
  std::istringstream all{std::string(text)};
  std::string line;
  std::ostringstream body;
  bool header = false;
  while (std::getline(all, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header) {
      std::istringstream h(line);
      std::string magic;
      int version = 0;
      if (!(h >> magic >> version) || magic != "LSTMW") throw std::invalid_argument("lstm weights: missing 'LSTMW' header");
      if (version != 1) throw std::invalid_argument("lstm weights: unsupported version " + std::to_string(version));
      header = true;
      continue;
    }
    body << line << '\n';
  }
  if (!header) throw std::invalid_argument("lstm weights: missing 'LSTMW' header");
  std::istringstream in(body.str());
  std::string tag;
  std::size_t h = 0, d = 0;
  if (!(in >> tag >> h >> d) || tag != "dims") throw std::invalid_argument("lstm weights: expected 'dims <h> <d>'");
  LstmWeights w = zeros(h, d);
  for_each_block(w, [&](const char* name, Matrix* m, std::vector<double>* v) {
    std::string got;
    if (!(in >> got) || got != name) throw std::invalid_argument(std::string("lstm weights: expected block ") + name);
    if (m) {
      std::size_t r = 0, c = 0;
      if (!(in >> r >> c) || r != m->rows || c != m->cols) {
        throw std::invalid_argument(std::string("lstm weights: ") + name + " has the wrong shape");
      }
      for (double& p : m->data) {
        if (!(in >> p)) throw std::invalid_argument(std::string("lstm weights: ") + name + " is truncated");
      }
    } else {
      std::size_t n = 0;
      if (!(in >> n) || n != v->size()) throw std::invalid_argument(std::string("lstm weights: ") + name + " has the wrong size");
      for (double& p : *v) {
        if (!(in >> p)) throw std::invalid_argument(std::string("lstm weights: ") + name + " is truncated");
      }
    }
  });
  if (in >> tag) throw std::invalid_argument("lstm weights: trailing data after b_c");
  return w;
}

const LstmWeights& LstmWeights::builtin() {
  static const LstmWeights w = parse(data::transition_lstm);
  return w;
}

std::string LstmWeights::serialize() const {
  validate();
  std::ostringstream out;
  out << std::setprecision(17);
  out << "LSTMW 1\ndims " << hidden << ' ' << input << '\n';
  LstmWeights copy = *this;
  for_each_block(copy, [&](const char* name, Matrix* m, std::vector<double>* v) {
    if (m) {
      out << name << ' ' << m->rows << ' ' << m->cols << '\n';
      for (std::size_t r = 0; r < m->rows; ++r) {
        for (std::size_t c = 0; c < m->cols; ++c) out << (c ? " " : "") << (*m)(r, c);
        out << '\n';
      }
    } else {
      out << name << ' ' << v->size() << '\n';
      for (std::size_t k = 0; k < v->size(); ++k) out << (k ? " " : "") << (*v)[k];
      out << '\n';
    }
  });
  return out.str();
}

Sequence lstm_forward(const Sequence& xs, const LstmWeights& w) {
  Sequence hs;
  for (auto& s : run(xs, w)) hs.push_back(std::move(s.h));
  return hs;
}

double lstm_loss(const Sequence& xs, const LstmWeights& w) {
  double loss = 0.0;
  for (const auto& h : lstm_forward(xs, w)) {
    for (double v : h) loss += v * v;
  }
  return loss;
}

LstmWeights lstm_gradient(const Sequence& xs, const LstmWeights& w) {
  const auto steps = run(xs, w);
  const std::size_t H = w.hidden, D = w.input;
  LstmWeights g = LstmWeights::zeros(H, D);
  std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t t = steps.size(); t-- > 0;) {
    const Step& s = steps[t];
    const auto& h_prev = t > 0 ? steps[t - 1].h : zeros;
    const auto& c_prev = t > 0 ? steps[t - 1].c : zeros;
    const auto& x = xs[t];
    std::vector<double> da_f(H), da_i(H), da_o(H), da_c(H), dc_prev(H);
    for (std::size_t k = 0; k < H; ++k) {
      const double dh = 2.0 * s.h[k] + dh_next[k];
      const double d_o = dh * s.tanh_c[k];
      const double dc = dh * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]) + dc_next[k];
      da_f[k] = dc * c_prev[k] * s.f[k] * (1.0 - s.f[k]);
      da_i[k] = dc * s.g[k] * s.i[k] * (1.0 - s.i[k]);
      da_o[k] = d_o * s.o[k] * (1.0 - s.o[k]);
      da_c[k] = dc * s.i[k] * (1.0 - s.g[k] * s.g[k]);
      dc_prev[k] = dc * s.f[k];
    }
    std::vector<double> dh_prev(H, 0.0);
    auto accumulate = [&](const std::vector<double>& da, Matrix& dW, Matrix& dU, std::vector<double>& db,
                          const Matrix& U) {
      for (std::size_t r = 0; r < H; ++r) {
        for (std::size_t c = 0; c < D; ++c) dW(r, c) += da[r] * x[c];
        for (std::size_t c = 0; c < H; ++c) {
          dU(r, c) += da[r] * h_prev[c];
          dh_prev[c] += U(r, c) * da[r];
        }
        db[r] += da[r];
      }
    };
    accumulate(da_f, g.W_f, g.U_f, g.b_f, w.U_f);
    accumulate(da_i, g.W_i, g.U_i, g.b_i, w.U_i);
    accumulate(da_o, g.W_o, g.U_o, g.b_o, w.U_o);
    accumulate(da_c, g.W_c, g.U_c, g.b_c, w.U_c);
    dh_next = std::move(dh_prev);
    dc_next = std::move(dc_prev);
  }
  return g;
}

double lstm_grad_check(const LstmWeights& w, const Sequence& xs, double eps) {
  LstmWeights analytic = lstm_gradient(xs, w);
  LstmWeights probe = w;
  const auto params = parameter_pointers(probe);
  const auto grads = parameter_pointers(analytic);
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double saved = *params[k];
    *params[k] = saved + eps;
    const double up = lstm_loss(xs, probe);
    *params[k] = saved - eps;
    const double down = lstm_loss(xs, probe);
    *params[k] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = *grads[k];
    const double err = std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-6);
    worst = std::max(worst, err);
  }
  return worst;
}

Sequence transition_features(const ScriptDoc& doc) {
  std::vector<std::size_t> cue_count(doc.segments.size(), 0);
  for (const auto& cue : doc.cues) {
    if (cue.anchor.segment >= 0 && static_cast<std::size_t>(cue.anchor.segment) < cue_count.size()) {
      ++cue_count[static_cast<std::size_t>(cue.anchor.segment)];
    }
  }
  Sequence out;
  for (std::size_t s = 0; s < doc.segments.size(); ++s) {
    const Segment& seg = doc.segments[s];
    std::size_t words = 0;
    std::istringstream in(seg.text);
    for (std::string tok; in >> tok;) ++words;
    const double density = words ? static_cast<double>(cue_count[s]) / static_cast<double>(words) : 0.0;
    const double dialogue = seg.kind == SegmentKind::kDialogue ? 1.0 : 0.0;
    const double change = s > 0 && doc.segments[s - 1].voice_id != seg.voice_id ? 1.0 : 0.0;
    out.push_back({density, seg.sentiment, dialogue, change});
  }
  return out;
}

std::vector<double> transition_scores(const ScriptDoc& doc, const LstmWeights& w) {
  std::vector<double> scores;
  for (const auto& h : lstm_forward(transition_features(doc), w)) {
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= static_cast<double>(h.size());
    scores.push_back((1.0 + mean) / 2.0);
  }
  return scores;
}

double transition_pause_s(double score) { return 0.4 + 0.6 * score; }

}  // namespace audiobook
