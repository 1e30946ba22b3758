#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "emoeeg/classify/train_config.hpp"
#include "emoeeg/error.hpp"
#include "emoeeg/matrix.hpp"
#include "emoeeg/random.hpp"

namespace emoeeg {

/// One-hidden-layer perceptron [d, hidden, out] with ReLU hidden units.
/// Two classes use a single sigmoid output with binary cross-entropy; more
/// classes use softmax with categorical cross-entropy.
///
/// Parameters live in one flat vector laid out as W1 (hidden x d, row-major),
/// b1, W2 (out x hidden, row-major), b2.
struct MlpModel {
  std::size_t n_inputs = 0;
  std::size_t n_hidden = 0;
  std::size_t n_classes = 2;
  std::vector<double> params;

  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;

  std::size_t n_outputs() const { return n_classes == 2 ? 1 : n_classes; }
  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return n_hidden * n_inputs; }
  std::size_t w2_offset() const { return b1_offset() + n_hidden; }
  std::size_t b2_offset() const { return w2_offset() + n_outputs() * n_hidden; }
  std::size_t n_params() const { return b2_offset() + n_outputs(); }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

namespace detail {

struct MlpScratch {
  std::vector<double> pre, hidden, out, d_out, d_hidden;
  explicit MlpScratch(const MlpModel& m)
      : pre(m.n_hidden), hidden(m.n_hidden), out(m.n_outputs()), d_out(m.n_outputs()), d_hidden(m.n_hidden) {}
};

inline void mlp_forward(const MlpModel& m, std::span<const double> x, MlpScratch& s) {
  const double* w1 = m.params.data() + m.w1_offset();
  const double* b1 = m.params.data() + m.b1_offset();
  const double* w2 = m.params.data() + m.w2_offset();
  const double* b2 = m.params.data() + m.b2_offset();
  for (std::size_t h = 0; h < m.n_hidden; ++h) {
    double acc = b1[h];
    const double* row = w1 + h * m.n_inputs;
    for (std::size_t i = 0; i < m.n_inputs; ++i) acc += row[i] * x[i];
    s.pre[h] = acc;
    s.hidden[h] = acc > 0.0 ? acc : 0.0;
  }
  for (std::size_t o = 0; o < m.n_outputs(); ++o) {
    double acc = b2[o];
    const double* row = w2 + o * m.n_hidden;
    for (std::size_t h = 0; h < m.n_hidden; ++h) acc += row[h] * s.hidden[h];
    s.out[o] = acc;
  }
}

/// Loss for one sample from the logits in s.out; fills s.d_out with dLoss/dlogit.
inline double mlp_output_loss(const MlpModel& m, int label, MlpScratch& s) {
  if (m.n_classes == 2) {
    const double z = s.out[0];
    const double t = label == 1 ? 1.0 : 0.0;
    const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    s.d_out[0] = p - t;
    return std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
  }
  const double zmax = *std::max_element(s.out.begin(), s.out.end());
  double sum = 0.0;
  for (double z : s.out) sum += std::exp(z - zmax);
  const double lse = zmax + std::log(sum);
  for (std::size_t o = 0; o < s.out.size(); ++o)
    s.d_out[o] = std::exp(s.out[o] - lse) - (static_cast<int>(o) == label ? 1.0 : 0.0);
  return lse - s.out[static_cast<std::size_t>(label)];
}

inline void mlp_backward(const MlpModel& m, std::span<const double> x, MlpScratch& s, std::span<double> grad) {
  const double* w2 = m.params.data() + m.w2_offset();
  double* g_w1 = grad.data() + m.w1_offset();
  double* g_b1 = grad.data() + m.b1_offset();
  double* g_w2 = grad.data() + m.w2_offset();
  double* g_b2 = grad.data() + m.b2_offset();
  std::fill(s.d_hidden.begin(), s.d_hidden.end(), 0.0);
  for (std::size_t o = 0; o < m.n_outputs(); ++o) {
    const double d = s.d_out[o];
    g_b2[o] += d;
    double* grow = g_w2 + o * m.n_hidden;
    const double* wrow = w2 + o * m.n_hidden;
    for (std::size_t h = 0; h < m.n_hidden; ++h) {
      grow[h] += d * s.hidden[h];
      s.d_hidden[h] += d * wrow[h];
    }
  }
  for (std::size_t h = 0; h < m.n_hidden; ++h) {
    if (!(s.pre[h] > 0.0)) continue;
    const double d = s.d_hidden[h];
    g_b1[h] += d;
    double* grow = g_w1 + h * m.n_inputs;
    for (std::size_t i = 0; i < m.n_inputs; ++i) grow[i] += d * x[i];
  }
}

}  // namespace detail

namespace detail {

inline MlpModel mlp_init(std::size_t n_inputs, std::size_t n_classes, std::size_t n_hidden, SplitMix64& rng) {
  if (n_inputs == 0) throw Error(Errc::invalid_argument, "mlp: need at least one input");
  if (n_classes < 2) throw Error(Errc::single_class, "mlp: need at least two classes");
  MlpModel m;
  m.n_inputs = n_inputs;
  m.n_hidden = n_hidden;
  m.n_classes = n_classes;
  m.params.assign(m.n_params(), 0.0);
  const double l1 = std::sqrt(6.0 / static_cast<double>(m.n_inputs));
  for (std::size_t k = 0; k < m.b1_offset(); ++k) m.params[m.w1_offset() + k] = rng.uniform(-l1, l1);
  const double l2 = std::sqrt(6.0 / static_cast<double>(m.n_hidden));
  for (std::size_t k = 0; k < m.n_outputs() * m.n_hidden; ++k) m.params[m.w2_offset() + k] = rng.uniform(-l2, l2);
  return m;
}

}  // namespace detail

/// He-uniform weights U(-sqrt(6/fan_in), sqrt(6/fan_in)), zero biases.
inline MlpModel mlp_init(std::size_t n_inputs, std::size_t n_classes, const TrainConfig& config) {
  SplitMix64 rng(config.seed);
  return detail::mlp_init(n_inputs, n_classes, config.mlp_hidden, rng);
}

struct LossGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

/// Mean cross-entropy over the selected rows and its gradient w.r.t. the flat
/// parameter vector. Empty `rows` means all rows.
inline LossGradient mlp_loss_gradient(const MlpModel& m, const Matrix& x, std::span<const int> y,
                                      std::span<const std::size_t> rows = {}) {
  if (x.cols() != m.n_inputs) throw Error(Errc::dimension_mismatch, "mlp: input dimension mismatch");
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(x.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  LossGradient out;
  out.gradient.assign(m.n_params(), 0.0);
  detail::MlpScratch s(m);
  for (std::size_t r : rows) {
    detail::mlp_forward(m, x.row(r), s);
    out.loss += detail::mlp_output_loss(m, y[r], s);
    detail::mlp_backward(m, x.row(r), s, out.gradient);
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  out.loss *= inv;
  for (double& g : out.gradient) g *= inv;
  return out;
}

inline double mlp_loss(const MlpModel& m, const Matrix& x, std::span<const int> y) {
  if (x.cols() != m.n_inputs) throw Error(Errc::dimension_mismatch, "mlp: input dimension mismatch");
  detail::MlpScratch s(m);
  double loss = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    detail::mlp_forward(m, x.row(r), s);
    loss += detail::mlp_output_loss(m, y[r], s);
  }
  return loss / static_cast<double>(x.rows());
}

/// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on cross-entropy.
/// `n_classes` 0 infers max label + 1. Batch order is reshuffled every epoch
/// from the same seeded stream that produced the initial weights.
inline MlpModel mlp_train(const Matrix& x, std::span<const int> y, const TrainConfig& config,
                          std::size_t n_classes = 0) {
  config.validate();
  if (x.rows() != y.size()) throw Error(Errc::dimension_mismatch, "mlp: row/label count mismatch");
  if (x.rows() == 0) throw Error(Errc::invalid_argument, "mlp: no training rows");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(Errc::non_finite, "mlp: non-finite training value");
  int max_label = 0;
  for (int l : y) {
    if (l < 0) throw Error(Errc::invalid_argument, "mlp: labels must be non-negative");
    max_label = std::max(max_label, l);
  }
  if (std::all_of(y.begin(), y.end(), [&](int l) { return l == y[0]; }))
    throw Error(Errc::single_class, "mlp: training data contains a single class");
  if (n_classes == 0) n_classes = static_cast<std::size_t>(max_label) + 1;
  if (static_cast<std::size_t>(max_label) >= n_classes)
    throw Error(Errc::invalid_argument, "mlp: label exceeds class count");

  SplitMix64 rng(config.seed);
  MlpModel m = detail::mlp_init(x.cols(), n_classes, config.mlp_hidden, rng);

  m.initial_loss = mlp_loss(m, x, y);
  std::vector<double> mom(m.n_params(), 0.0), vel(m.n_params(), 0.0);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < config.mlp_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double epoch_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.mlp_batch) {
      const std::size_t len = std::min(config.mlp_batch, order.size() - start);
      const auto batch = std::span<const std::size_t>(order).subspan(start, len);
      const auto lg = mlp_loss_gradient(m, x, y, batch);
      epoch_sum += lg.loss * static_cast<double>(len);
      beta1_t *= beta1;
      beta2_t *= beta2;
      const double step = config.mlp_learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      for (std::size_t k = 0; k < m.params.size(); ++k) {
        const double g = lg.gradient[k];
        mom[k] = beta1 * mom[k] + (1.0 - beta1) * g;
        vel[k] = beta2 * vel[k] + (1.0 - beta2) * g * g;
        m.params[k] -= step * mom[k] / (std::sqrt(vel[k]) + eps);
      }
    }
    m.epoch_loss.push_back(epoch_sum / static_cast<double>(order.size()));
  }
  m.final_loss = config.mlp_epochs == 0 ? m.initial_loss : mlp_loss(m, x, y);
  return m;
}

/// Class probabilities, one row per input and one column per class.
inline Matrix mlp_predict_proba(const MlpModel& m, const Matrix& rows) {
  if (rows.cols() != m.n_inputs) throw Error(Errc::dimension_mismatch, "mlp: query dimension mismatch");
  Matrix out(rows.rows(), m.n_classes);
  detail::MlpScratch s(m);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    detail::mlp_forward(m, rows.row(r), s);
    if (m.n_classes == 2) {
      const double z = s.out[0];
      const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      out(r, 0) = 1.0 - p;
      out(r, 1) = p;
    } else {
      const double zmax = *std::max_element(s.out.begin(), s.out.end());
      double sum = 0.0;
      for (std::size_t o = 0; o < s.out.size(); ++o) sum += (out(r, o) = std::exp(s.out[o] - zmax));
      for (std::size_t o = 0; o < s.out.size(); ++o) out(r, o) /= sum;
    }
  }
  return out;
}

/// Binary: class 1 iff p >= 0.5. Multiclass: argmax, lowest index on ties.
inline std::vector<int> mlp_predict(const MlpModel& m, const Matrix& rows) {
  const Matrix p = mlp_predict_proba(m, rows);
  std::vector<int> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < p.rows(); ++r) {
    if (m.n_classes == 2) {
      out.push_back(p(r, 1) >= 0.5 ? 1 : 0);
      continue;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.cols(); ++c)
      if (p(r, c) > p(r, best)) best = c;
    out.push_back(static_cast<int>(best));
  }
  return out;
}

}  // namespace emoeeg
