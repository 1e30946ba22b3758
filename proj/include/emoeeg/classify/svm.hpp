#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "emoeeg/classify/train_config.hpp"
#include "emoeeg/error.hpp"
#include "emoeeg/matrix.hpp"

namespace emoeeg {

struct Kernel {
  KernelType type = KernelType::rbf;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    double acc = 0.0;
    if (type == KernelType::linear) {
      for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
      return acc;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      acc += d * d;
    }
    return std::exp(-gamma * acc);
  }

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// Binary kernel SVM. f(x) = sum_i coef_i K(sv_i, x) + bias, coef_i = alpha_i y_i.
struct SvmModel {
  Matrix support_vectors;
  std::vector<double> alpha;
  std::vector<int> sv_labels;
  std::vector<double> coef;
  /// Row index of each support vector in the training matrix.
  std::vector<std::size_t> support_indices;
  double bias = 0.0;
  Kernel kernel;
  double c = 1.0;

  std::size_t iterations = 0;
  bool converged = false;

  double decision(std::span<const double> x) const {
    double f = bias;
    for (std::size_t i = 0; i < coef.size(); ++i) f += coef[i] * kernel(support_vectors.row(i), x);
    return f;
  }

  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

/// Auto gamma: 1 / (d * mean per-column population variance); 1 when that is 0.
inline double auto_gamma(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) return 1.0;
  double var_sum = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mu = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mu += x(r, c);
    mu /= static_cast<double>(x.rows());
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - mu) * (x(r, c) - mu);
    var_sum += ss / static_cast<double>(x.rows());
  }
  const double mean_var = var_sum / static_cast<double>(x.cols());
  if (!(mean_var > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(x.cols()) * mean_var);
}

/// Optional per-iteration diagnostics for tests.
struct SvmTrace {
  std::vector<double> dual_objective;
};

/// SMO on the C-SVC dual, max W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
/// subject to 0 <= a_i <= C and sum a_i y_i = 0. Each step optimizes the
/// maximal-violating pair chosen with second-order information. Stops once
/// the KKT violation gap drops below tol, or after max_passes * max(n, 1000)
/// pair updates.
inline SvmModel svm_train(const Matrix& x, std::span<const int> y, const TrainConfig& config,
                          SvmTrace* trace = nullptr) {
  config.validate();
  const std::size_t n = x.rows();
  if (y.size() != n) throw Error(Errc::dimension_mismatch, "svm: row/label count mismatch");
  for (double v : x.data())
    if (!std::isfinite(v)) throw Error(Errc::non_finite, "svm: non-finite training value");
  bool has_pos = false, has_neg = false;
  for (int l : y) {
    if (l == 1) has_pos = true;
    else if (l == -1) has_neg = true;
    else throw Error(Errc::invalid_argument, "svm: labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw Error(Errc::single_class, "svm: training data contains a single class");

  const double c = config.svm_c;
  Kernel kernel{config.svm_kernel, config.svm_gamma > 0.0 ? config.svm_gamma : auto_gamma(x)};
  if (kernel.type == KernelType::linear) kernel.gamma = 0.0;

  std::vector<double> q(n * n);  // Q_ij = y_i y_j K_ij
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = static_cast<double>(y[i] * y[j]) * kernel(x.row(i), x.row(j));
      q[i * n + j] = q[j * n + i] = v;
    }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 1/2 a'Qa - e'a
  auto up = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < c : alpha[t] > 0.0; };
  auto low = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < c; };
  auto dual = [&] {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (grad[t] - 1.0);
    return -0.5 * f;
  };
  if (trace) trace->dual_objective.push_back(dual());

  constexpr double tau = 1e-12;
  const std::size_t max_iter = config.svm_max_passes * std::max<std::size_t>(n, 1000);
  std::size_t iter = 0;
  bool converged = false;

  for (; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t)
      if (up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    double gmin = std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (!low(t)) continue;
      const double v = -y[t] * grad[t];
      gmin = std::min(gmin, v);
      if (i == n) continue;
      const double b = gmax - v;
      if (b > 0.0) {
        double a = q[i * n + i] + q[t * n + t] - 2.0 * y[i] * y[t] * q[i * n + t];
        if (a <= 0.0) a = tau;
        const double obj = -(b * b) / a;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax - gmin < config.svm_tol) {
      converged = true;
      break;
    }

    const double old_ai = alpha[i], old_aj = alpha[j];
    const double* qi = &q[i * n];
    const double* qj = &q[j * n];
    if (y[i] != y[j]) {
      double a = qi[i] + qj[j] + 2.0 * qi[j];
      if (a <= 0.0) a = tau;
      const double delta = (-grad[i] - grad[j]) / a;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double a = qi[i] + qj[j] - 2.0 * qi[j];
      if (a <= 0.0) a = tau;
      const double delta = (grad[i] - grad[j]) / a;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * dai + qj[t] * daj;
    if (trace) trace->dual_objective.push_back(dual());
  }

  // rho: average of y_i G_i over free vectors, else midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  SvmModel m;
  m.kernel = kernel;
  m.c = c;
  m.bias = -rho;
  m.iterations = iter;
  m.converged = converged;
  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0) sv.push_back(t);
  m.support_vectors = x.select_rows(sv);
  m.support_indices = sv;
  for (std::size_t t : sv) {
    m.alpha.push_back(alpha[t]);
    m.sv_labels.push_back(y[t]);
    m.coef.push_back(alpha[t] * y[t]);
  }
  return m;
}

/// sign(f(x)); f == 0 maps to +1.
inline std::vector<int> svm_predict(const SvmModel& model, const Matrix& rows) {
  if (model.support_vectors.rows() > 0 && rows.cols() != model.support_vectors.cols())
    throw Error(Errc::dimension_mismatch, "svm: query dimension mismatch");
  std::vector<int> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(model.decision(rows.row(r)) >= 0.0 ? 1 : -1);
  return out;
}

}  // namespace emoeeg
