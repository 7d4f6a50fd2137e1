#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "flawnet/dataset.hpp"
#include "flawnet/rng.hpp"

namespace flawnet {

/// Seeded bimodal generator: both modalities are noisy linear views of a
/// shared latent vector, and the label is the sign of a fixed projection of
/// that latent.
struct SynthConfig {
  std::size_t n = 1000;
  std::size_t latent_dim = 8;
  std::size_t dim_x = 40;
  std::size_t dim_y = 30;
  double noise_x = 0.5;
  double noise_y = 3.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1) throw ConfigError("synthetic n must be positive");
    if (latent_dim < 1) throw ConfigError("latent_dim must be positive");
    if (latent_dim > std::min(dim_x, dim_y))
      throw ConfigError("latent_dim must not exceed min(dim_x, dim_y)");
    if (noise_x < 0.0 || noise_y < 0.0) throw ConfigError("noise levels must be non-negative");
  }
};

namespace detail {

/// dim × k projection with unit-norm columns.
inline Matrix random_projection(Rng& rng, std::size_t dim, std::size_t k) {
  Matrix a(dim, k);
  for (std::size_t j = 0; j < k; ++j) {
    double norm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      a(i, j) = rng.normal();
      norm += a(i, j) * a(i, j);
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < dim; ++i) a(i, j) /= norm;
  }
  return a;
}

}  // namespace detail

inline BimodalDataset gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t k = cfg.latent_dim;
  const Matrix a = detail::random_projection(rng, cfg.dim_x, k);
  const Matrix b = detail::random_projection(rng, cfg.dim_y, k);
  std::vector<double> w(k);
  double wn = 0.0;
  for (auto& v : w) {
    v = rng.normal();
    wn += v * v;
  }
  wn = std::sqrt(wn);
  for (auto& v : w) v /= wn;

  BimodalDataset ds;
  ds.x = Matrix(cfg.n, cfg.dim_x);
  ds.y = Matrix(cfg.n, cfg.dim_y);
  for (std::size_t j = 0; j < cfg.dim_x; ++j) ds.x_names.push_back("f" + std::to_string(j));
  for (std::size_t j = 0; j < cfg.dim_y; ++j) ds.y_names.push_back("f" + std::to_string(j));

  std::vector<double> z(k);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    ds.ids.push_back("fn" + std::to_string(i));
    double proj = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      z[l] = rng.normal();
      proj += w[l] * z[l];
    }
    for (std::size_t j = 0; j < cfg.dim_x; ++j) {
      double v = 0.0;
      for (std::size_t l = 0; l < k; ++l) v += a(j, l) * z[l];
      ds.x(i, j) = v + cfg.noise_x * rng.normal();
    }
    for (std::size_t j = 0; j < cfg.dim_y; ++j) {
      double v = 0.0;
      for (std::size_t l = 0; l < k; ++l) v += b(j, l) * z[l];
      ds.y(i, j) = v + cfg.noise_y * rng.normal();
    }
    ds.labels.push_back(proj > 0.0 ? 1 : 0);
  }
  return ds;
}

}  // namespace flawnet
