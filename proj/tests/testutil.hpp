#pragma once

// Test-side oracles, independent of the library's forward/backward paths:
// a naive layer-by-layer forward, central finite differences, and small
// random-instance generators.

#include <cmath>
#include <functional>
#include <vector>

#include "flawnet/matrix.hpp"
#include "flawnet/nn.hpp"
#include "flawnet/rng.hpp"

namespace testutil {

using flawnet::Matrix;

inline Matrix random_matrix(flawnet::Rng& rng, std::size_t rows, std::size_t cols,
                            double scale = 1.0) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

/// Naive y = x · Wᵀ + b computed with index loops only.
inline Matrix naive_linear(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
  Matrix out(x.rows(), w.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t o = 0; o < w.rows(); ++o) {
      double s = b[o];
      for (std::size_t k = 0; k < x.cols(); ++k) s += x(i, k) * w(o, k);
      out(i, o) = s;
    }
  }
  return out;
}

inline Matrix naive_leaky(Matrix z, double slope) {
  for (double& v : z.data())
    if (v < 0.0) v = slope * v;
  return z;
}

/// Naive forward through an Mlp built from effective weights.
inline Matrix naive_mlp_forward(const flawnet::Mlp& m, const Matrix& x) {
  Matrix cur = x;
  for (std::size_t i = 0; i < m.layer_count(); ++i) {
    cur = naive_linear(cur, m.layer(i).effective_weight(), m.layer(i).bias());
    if (i + 1 < m.layer_count() || m.activate_last()) cur = naive_leaky(cur, m.slope());
  }
  return cur;
}

inline double naive_mse(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

/// Pearson correlation summed over matching columns, straight from the
/// definition.
inline double naive_correlation_sum(const Matrix& hx, const Matrix& hy) {
  double total = 0.0;
  const double n = static_cast<double>(hx.rows());
  for (std::size_t j = 0; j < hx.cols(); ++j) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < hx.rows(); ++i) {
      mx += hx(i, j);
      my += hy(i, j);
    }
    mx /= n;
    my /= n;
    double qx = 0.0, qy = 0.0, s = 0.0;
    for (std::size_t i = 0; i < hx.rows(); ++i) {
      qx += (hx(i, j) - mx) * (hx(i, j) - mx);
      qy += (hy(i, j) - my) * (hy(i, j) - my);
      s += (hx(i, j) - mx) * (hy(i, j) - my);
    }
    if (qx <= 0.0 || qy <= 0.0) continue;
    total += s / std::sqrt(qx * qy);
  }
  return total;
}

/// Central finite differences of `loss()` w.r.t. every element behind
/// `params`. Returns the largest relative error against `analytic` (aligned
/// with params), with a small floor in the denominator.
inline double max_grad_relative_error(const std::vector<flawnet::ParamRef>& params,
                                      const std::vector<std::vector<double>>& analytic,
                                      const std::function<double()>& loss,
                                      double eps = 1e-5) {
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t k = 0; k < params[p].size; ++k) {
      double& slot = params[p].data[k];
      const double saved = slot;
      slot = saved + eps;
      const double up = loss();
      slot = saved - eps;
      const double down = loss();
      slot = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[p][k];
      const double denom = std::max({std::abs(numeric), std::abs(a), 1e-6});
      worst = std::max(worst, std::abs(numeric - a) / denom);
    }
  }
  return worst;
}

/// Finite differences w.r.t. the elements of one matrix (e.g. an input).
inline double max_input_grad_relative_error(Matrix& input, const Matrix& analytic,
                                            const std::function<double()>& loss,
                                            double eps = 1e-5) {
  double worst = 0.0;
  for (std::size_t k = 0; k < input.size(); ++k) {
    const double saved = input.data()[k];
    input.data()[k] = saved + eps;
    const double up = loss();
    input.data()[k] = saved - eps;
    const double down = loss();
    input.data()[k] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic.data()[k];
    const double denom = std::max({std::abs(numeric), std::abs(a), 1e-6});
    worst = std::max(worst, std::abs(numeric - a) / denom);
  }
  return worst;
}

}  // namespace testutil
