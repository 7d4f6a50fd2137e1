#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "flawnet/nn.hpp"

namespace flawnet {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over a fixed list of parameter blocks. The params
/// passed to step() must keep the same shapes call to call.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {
    if (cfg.lr <= 0.0) throw ConfigError("Adam: lr must be positive");
    if (cfg.beta1 <= 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 <= 0.0 || cfg.beta2 >= 1.0)
      throw ConfigError("Adam: betas must lie in (0, 1)");
    if (cfg.epsilon <= 0.0) throw ConfigError("Adam: epsilon must be positive");
  }

  void step(const std::vector<ParamRef>& params, const std::vector<std::vector<double>>& grads) {
    if (params.size() != grads.size()) throw ShapeError("Adam::step: params/grads count differ");
    if (m_.empty()) {
      m_.resize(params.size());
      v_.resize(params.size());
      for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i].assign(params[i].size, 0.0);
        v_[i].assign(params[i].size, 0.0);
      }
    } else if (m_.size() != params.size()) {
      throw ShapeError("Adam::step: parameter list changed between steps");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& p = params[i];
      const auto& g = grads[i];
      if (g.size() != p.size) throw ShapeError("Adam::step: grad size mismatch for " + p.name);
      auto& m = m_[i];
      auto& v = v_[i];
      for (std::size_t k = 0; k < p.size; ++k) {
        const double gk = g[k];
        if (!std::isfinite(gk))
          throw NumericError("Adam::step: non-finite gradient for " + p.name);
        m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * gk;
        v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * gk * gk;
        const double mhat = m[k] / c1;
        const double vhat = v[k] / c2;
        p.data[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
      }
    }
  }

  long step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace flawnet
