#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "flawnet/matrix.hpp"

namespace flawnet {

/// Centered sums of squares below this are treated as zero variance.
inline constexpr double kZeroVarianceEps = 1e-24;

struct LossGrad {
  double value = 0.0;
  Matrix grad;  // w.r.t. the first argument
};

/// Mean over all elements of squared differences.
inline LossGrad mse_loss(const Matrix& pred, const Matrix& target) {
  pred.require_same_shape(target, "mse_loss");
  const double n = static_cast<double>(pred.size());
  if (n == 0.0) return {0.0, Matrix(pred.rows(), pred.cols())};
  LossGrad out;
  out.grad = Matrix(pred.rows(), pred.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred.data()[i] - target.data()[i];
    sum += e * e;
    out.grad.data()[i] = 2.0 * e / n;
  }
  out.value = sum / n;
  return out;
}

inline double mse_value(const Matrix& pred, const Matrix& target) {
  pred.require_same_shape(target, "mse_value");
  const double n = static_cast<double>(pred.size());
  if (n == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred.data()[i] - target.data()[i];
    sum += e * e;
  }
  return sum / n;
}

struct CorrelationResult {
  double value = 0.0;
  Matrix grad_x, grad_y;
};

/// Sum over dimensions of the Pearson correlation between matching columns
/// of hx and hy across the batch. Columns with zero variance on either side
/// contribute 0.
inline CorrelationResult correlation_loss(const Matrix& hx, const Matrix& hy) {
  hx.require_same_shape(hy, "correlation_loss");
  const std::size_t n = hx.rows(), d = hx.cols();
  if (n < 2) throw DataError("correlation_loss: degenerate batch (need at least 2 rows)");
  CorrelationResult out;
  out.grad_x = Matrix(n, d);
  out.grad_y = Matrix(n, d);
  std::vector<double> cx(n), cy(n);
  for (std::size_t j = 0; j < d; ++j) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += hx(i, j);
      my += hy(i, j);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double qx = 0.0, qy = 0.0, s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cx[i] = hx(i, j) - mx;
      cy[i] = hy(i, j) - my;
      qx += cx[i] * cx[i];
      qy += cy[i] * cy[i];
      s += cx[i] * cy[i];
    }
    if (qx <= kZeroVarianceEps || qy <= kZeroVarianceEps) continue;
    const double denom = std::sqrt(qx * qy);
    out.value += s / denom;
    for (std::size_t i = 0; i < n; ++i) {
      out.grad_x(i, j) = (cy[i] - (s / qx) * cx[i]) / denom;
      out.grad_y(i, j) = (cx[i] - (s / qy) * cy[i]) / denom;
    }
  }
  return out;
}

inline double correlation_value(const Matrix& hx, const Matrix& hy) {
  return correlation_loss(hx, hy).value;
}

/// Row-wise softmax.
inline Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto lrow = logits.row(i);
    auto prow = p.row(i);
    double m = lrow[0];
    for (double v : lrow) m = std::max(m, v);
    double z = 0.0;
    for (std::size_t j = 0; j < lrow.size(); ++j) {
      prow[j] = std::exp(lrow[j] - m);
      z += prow[j];
    }
    for (std::size_t j = 0; j < lrow.size(); ++j) prow[j] /= z;
  }
  return p;
}

/// Class weights proportional to inverse class frequency: n / (2 * count_c).
inline std::array<double, 2> inverse_class_weights(const std::vector<int>& labels) {
  std::array<double, 2> counts{0.0, 0.0};
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("inverse_class_weights: label outside {0,1}");
    counts[static_cast<std::size_t>(l)] += 1.0;
  }
  if (counts[0] == 0.0 || counts[1] == 0.0)
    throw DataError("inverse_class_weights: labels contain a single class");
  const double n = counts[0] + counts[1];
  return {n / (2.0 * counts[0]), n / (2.0 * counts[1])};
}

/// Softmax cross-entropy with per-class weights, averaged by total weight.
inline LossGrad weighted_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                                       const std::array<double, 2>& class_weights) {
  if (logits.cols() != 2) throw ShapeError("weighted_cross_entropy: expected 2 logit columns");
  if (logits.rows() != labels.size())
    throw ShapeError("weighted_cross_entropy: rows != label count");
  LossGrad out;
  out.grad = Matrix(logits.rows(), logits.cols());
  double wsum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    wsum += class_weights[static_cast<std::size_t>(labels[i])];
  const Matrix p = softmax_rows(logits);
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    const double w = class_weights[y];
    loss += -w * std::log(std::max(p(i, y), 1e-300));
    for (std::size_t j = 0; j < 2; ++j)
      out.grad(i, j) = w * (p(i, j) - (j == y ? 1.0 : 0.0)) / wsum;
  }
  out.value = loss / wsum;
  return out;
}

}  // namespace flawnet
