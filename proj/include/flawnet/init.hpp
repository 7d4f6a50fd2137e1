#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "flawnet/nn.hpp"
#include "flawnet/rng.hpp"

namespace flawnet {

/// Default mirrors the framework-default linear-layer init the experiments
/// rely on: weights uniform in ±1/sqrt(fan_in). The named schemes are the
/// ones compared by the initialization study.
enum class InitKind { Default, Constant, Kaiming, Xavier, Lsuv };

struct InitScheme {
  InitKind kind = InitKind::Default;
  double constant = 0.1;  // used only by Constant

  static InitScheme default_init() { return {InitKind::Default}; }
  static InitScheme constant_fill(double c) { return {InitKind::Constant, c}; }
  static InitScheme kaiming() { return {InitKind::Kaiming}; }
  static InitScheme xavier() { return {InitKind::Xavier}; }
  static InitScheme lsuv() { return {InitKind::Lsuv}; }
};

inline std::string to_string(const InitScheme& s) {
  switch (s.kind) {
    case InitKind::Default: return "default";
    case InitKind::Constant: return "constant";
    case InitKind::Kaiming: return "kaiming";
    case InitKind::Xavier: return "xavier";
    case InitKind::Lsuv: return "lsuv";
  }
  return "default";
}

/// Accepts "default", "kaiming", "xavier", "lsuv", "constant" or
/// "constant:<c>".
inline InitScheme parse_init_scheme(const std::string& text) {
  if (text == "default") return InitScheme::default_init();
  if (text == "kaiming") return InitScheme::kaiming();
  if (text == "xavier") return InitScheme::xavier();
  if (text == "lsuv") return InitScheme::lsuv();
  if (text == "constant") return InitScheme::constant_fill(0.1);
  if (text.starts_with("constant:")) {
    try {
      return InitScheme::constant_fill(std::stod(text.substr(9)));
    } catch (const std::exception&) {
      throw ConfigError("invalid constant init value in '" + text + "'");
    }
  }
  throw ConfigError("unknown init scheme '" + text + "'");
}

/// LeakyReLU gain used by Kaiming bounds.
inline double leaky_gain(double slope) { return std::sqrt(2.0 / (1.0 + slope * slope)); }

namespace detail {

inline void fill_uniform(Matrix& w, Rng& rng, double bound) {
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
}

/// Orthonormalizes rows when rows <= cols, otherwise columns (Gram-Schmidt).
inline void orthonormalize(Matrix& w, Rng& rng) {
  const bool by_rows = w.rows() <= w.cols();
  const std::size_t vecs = by_rows ? w.rows() : w.cols();
  const std::size_t len = by_rows ? w.cols() : w.rows();
  auto get = [&](std::size_t v, std::size_t k) -> double& {
    return by_rows ? w(v, k) : w(k, v);
  };
  for (std::size_t v = 0; v < vecs; ++v) {
    for (int attempt = 0; attempt < 16; ++attempt) {
      if (attempt > 0)
        for (std::size_t k = 0; k < len; ++k) get(v, k) = rng.normal();
      for (std::size_t u = 0; u < v; ++u) {
        double dot = 0.0;
        for (std::size_t k = 0; k < len; ++k) dot += get(v, k) * get(u, k);
        for (std::size_t k = 0; k < len; ++k) get(v, k) -= dot * get(u, k);
      }
      double norm = 0.0;
      for (std::size_t k = 0; k < len; ++k) norm += get(v, k) * get(v, k);
      norm = std::sqrt(norm);
      if (norm > 1e-12) {
        for (std::size_t k = 0; k < len; ++k) get(v, k) /= norm;
        break;
      }
    }
  }
}

inline double sample_std(const Matrix& m) {
  const double n = static_cast<double>(m.size());
  if (n < 2.0) return 0.0;
  double mean = 0.0;
  for (double v : m.data()) mean += v;
  mean /= n;
  double q = 0.0;
  for (double v : m.data()) q += (v - mean) * (v - mean);
  return std::sqrt(q / (n - 1.0));
}

}  // namespace detail

/// Initializes every layer of `m` in place. Weights follow the scheme;
/// biases are uniform in ±1/sqrt(fan_in) for all schemes. Layers that are
/// transposed views of already-initialized storage receive bias-only init.
/// Lsuv: orthonormal start, then each layer's weights are rescaled until the
/// pre-activation standard deviation on `calibration` lies in [0.9, 1.1]
/// (at most 10 passes per layer).
inline void initialize(Mlp& m, const InitScheme& scheme, Rng& rng,
                       const Matrix* calibration = nullptr) {
  if (scheme.kind == InitKind::Lsuv && calibration == nullptr)
    throw ConfigError("lsuv initialization requires a calibration batch");
  if (scheme.kind == InitKind::Constant && !std::isfinite(scheme.constant))
    throw ConfigError("constant initialization requires a finite value");

  for (std::size_t i = 0; i < m.layer_count(); ++i) {
    auto& layer = m.layer(i);
    const double fan_in = static_cast<double>(layer.in_dim());
    const double fan_out = static_cast<double>(layer.out_dim());
    if (!layer.transposed()) {
      Matrix& w = layer.stored_weight();
      switch (scheme.kind) {
        case InitKind::Default:
          detail::fill_uniform(w, rng, 1.0 / std::sqrt(fan_in));
          break;
        case InitKind::Constant:
          for (double& v : w.data()) v = scheme.constant;
          break;
        case InitKind::Kaiming:
          detail::fill_uniform(w, rng, leaky_gain(m.slope()) * std::sqrt(3.0 / fan_in));
          break;
        case InitKind::Xavier:
          detail::fill_uniform(w, rng, std::sqrt(6.0 / (fan_in + fan_out)));
          break;
        case InitKind::Lsuv:
          for (double& v : w.data()) v = rng.normal();
          detail::orthonormalize(w, rng);
          break;
      }
    }
    const double bb = 1.0 / std::sqrt(fan_in);
    for (double& b : layer.bias()) b = rng.uniform(-bb, bb);
  }

  if (scheme.kind == InitKind::Lsuv) {
    Matrix cur = *calibration;
    for (std::size_t i = 0; i < m.layer_count(); ++i) {
      auto& layer = m.layer(i);
      Matrix z = layer.forward(cur);
      if (!layer.transposed()) {
        for (int pass = 0; pass < 10; ++pass) {
          const double sd = detail::sample_std(z);
          if (sd >= 0.9 && sd <= 1.1) break;
          if (sd < 1e-12) break;
          layer.stored_weight() *= 1.0 / sd;
          z = layer.forward(cur);
        }
      }
      const bool act = (i + 1 < m.layer_count()) || m.activate_last();
      cur = act ? leaky_relu(std::move(z), m.slope()) : std::move(z);
    }
  }
}

inline void initialize(Mlp& m, const InitScheme& scheme, std::uint64_t seed,
                       const Matrix* calibration = nullptr) {
  Rng rng(seed);
  initialize(m, scheme, rng, calibration);
}

}  // namespace flawnet
