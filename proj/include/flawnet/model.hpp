#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "flawnet/init.hpp"
#include "flawnet/nn.hpp"

namespace flawnet {

enum class ArchKind { CorrNet, Jae, Bidnn, Baseline };

inline std::string to_string(ArchKind k) {
  switch (k) {
    case ArchKind::CorrNet: return "corrnet";
    case ArchKind::Jae: return "jae";
    case ArchKind::Bidnn: return "bidnn";
    case ArchKind::Baseline: return "baseline";
  }
  return "corrnet";
}

inline std::string display_name(ArchKind k) {
  switch (k) {
    case ArchKind::CorrNet: return "CorrNet";
    case ArchKind::Jae: return "JAE";
    case ArchKind::Bidnn: return "BiDNN";
    case ArchKind::Baseline: return "Baseline";
  }
  return "CorrNet";
}

inline ArchKind parse_arch_kind(const std::string& s) {
  if (s == "corrnet") return ArchKind::CorrNet;
  if (s == "jae") return ArchKind::Jae;
  if (s == "bidnn") return ArchKind::Bidnn;
  if (s == "baseline") return ArchKind::Baseline;
  throw ConfigError("unknown architecture '" + s + "'");
}

struct ArchConfig {
  ArchKind kind = ArchKind::CorrNet;
  std::size_t layer_width = 50;
  std::size_t layer_depth = 1;
  std::size_t dim_x = 0;
  std::size_t dim_y = 0;
  double lambda = 0.1;       // correlation weight; CorrNet only
  bool lambda_auto = false;  // resolve lambda from a training sample
  InitScheme init = InitScheme::default_init();
  std::size_t epochs = 100;
  double learning_rate = 1e-3;
  std::size_t batch_size = 256;
  std::uint64_t seed = 1;
  bool augment_train = false;  // add zero-modality copies of the training rows

  void validate() const {
    if (layer_width < 1 || layer_depth < 1)
      throw ConfigError("layer_width and layer_depth must be at least 1");
    if (dim_x < 1 || dim_y < 1) throw ConfigError("modality dimensions must be positive");
    if (kind == ArchKind::Jae && layer_width / 2 == 0)
      throw ConfigError("jae needs layer_width >= 2 (internal width is layer_width/2)");
    if (kind == ArchKind::CorrNet && !lambda_auto && lambda < 0.0)
      throw ConfigError("lambda must be non-negative");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  }
};

namespace detail {

inline std::vector<std::size_t> encoder_dims(std::size_t in, std::size_t width,
                                             std::size_t depth) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), depth, width);
  return dims;
}

inline std::vector<std::size_t> decoder_dims(std::size_t width, std::size_t out,
                                             std::size_t depth, std::size_t first_in = 0) {
  std::vector<std::size_t> dims{first_in == 0 ? width : first_in};
  dims.insert(dims.end(), depth - 1, width);
  dims.push_back(out);
  return dims;
}

inline std::vector<std::size_t> stack_dims(std::size_t width, std::size_t depth) {
  return std::vector<std::size_t>(depth + 1, width);
}

}  // namespace detail

/// Parameters of one multimodal architecture (or the early-fusion baseline).
///
/// Component usage by kind:
///   CorrNet  — enc_x, enc_y, mixing, dec_x, dec_y, head
///   Jae      — the above plus private branches penc_*/pdec_*
///   Bidnn    — two translators: x→y is enc_x|mixing|dec_y, y→x is
///              enc_y|mix_yx|dec_x; mix_yx weights are transposed views of
///              mixing's (shared storage)
///   Baseline — enc_x consumes the concatenated modalities, then mixing, head
struct MultimodalModel {
  ArchKind kind = ArchKind::CorrNet;
  ArchConfig config;
  Mlp enc_x, enc_y, mixing, mix_yx, dec_x, dec_y;
  Mlp penc_x, pdec_x, penc_y, pdec_y;
  Mlp head;

  MultimodalModel() = default;
  MultimodalModel(const MultimodalModel&) = delete;
  MultimodalModel& operator=(const MultimodalModel&) = delete;
  MultimodalModel(MultimodalModel&&) = default;
  MultimodalModel& operator=(MultimodalModel&&) = default;

  /// Width of the joint representation fed to the classification head.
  /// JAE concatenates the source-modality private code with the shared code,
  /// so its representation is twice the internal (halved) width.
  std::size_t representation_width() const {
    switch (kind) {
      case ArchKind::Bidnn: return 2 * config.layer_width;
      case ArchKind::Jae: return 2 * (config.layer_width / 2);
      default: return config.layer_width;
    }
  }

  std::vector<ParamRef> representation_parameters() {
    std::vector<ParamRef> refs;
    enc_x.collect_params("enc_x", refs);
    enc_y.collect_params("enc_y", refs);
    mixing.collect_params("mixing", refs);
    mix_yx.collect_params("mix_yx", refs);
    dec_x.collect_params("dec_x", refs);
    dec_y.collect_params("dec_y", refs);
    penc_x.collect_params("penc_x", refs);
    pdec_x.collect_params("pdec_x", refs);
    penc_y.collect_params("penc_y", refs);
    pdec_y.collect_params("pdec_y", refs);
    return dedupe(refs);
  }

  std::vector<ParamRef> head_parameters() {
    std::vector<ParamRef> refs;
    head.collect_params("head", refs);
    return refs;
  }

  std::vector<ParamRef> parameters() {
    auto refs = representation_parameters();
    auto h = head_parameters();
    refs.insert(refs.end(), h.begin(), h.end());
    return refs;
  }

 private:
  static std::vector<ParamRef> dedupe(const std::vector<ParamRef>& refs) {
    std::vector<ParamRef> out;
    std::unordered_set<const void*> seen;
    for (const auto& r : refs)
      if (seen.insert(r.key).second) out.push_back(r);
    return out;
  }
};

/// Builds the architecture's layer structure with zero parameters; call
/// initialize_model (or initialize per Mlp) before use.
inline MultimodalModel build_model(const ArchConfig& cfg) {
  cfg.validate();
  MultimodalModel m;
  m.kind = cfg.kind;
  m.config = cfg;
  const std::size_t w = cfg.layer_width, d = cfg.layer_depth;
  const std::size_t dx = cfg.dim_x, dy = cfg.dim_y;
  using detail::decoder_dims;
  using detail::encoder_dims;
  using detail::stack_dims;

  switch (cfg.kind) {
    case ArchKind::CorrNet: {
      m.enc_x = Mlp(encoder_dims(dx, w, d), /*activate_last=*/true);
      m.enc_y = Mlp(encoder_dims(dy, w, d), true);
      m.mixing = Mlp(stack_dims(w, d), true);
      m.dec_x = Mlp(decoder_dims(w, dx, d));
      m.dec_y = Mlp(decoder_dims(w, dy, d));
      break;
    }
    case ArchKind::Jae: {
      const std::size_t hw = w / 2;
      m.enc_x = Mlp(encoder_dims(dx, hw, d), true);
      m.enc_y = Mlp(encoder_dims(dy, hw, d), true);
      m.mixing = Mlp(stack_dims(hw, d), true);
      m.dec_x = Mlp(decoder_dims(hw, dx, d, /*first_in=*/2 * hw));
      m.dec_y = Mlp(decoder_dims(hw, dy, d, 2 * hw));
      m.penc_x = Mlp(encoder_dims(dx, hw, d), true);
      m.penc_y = Mlp(encoder_dims(dy, hw, d), true);
      m.pdec_x = Mlp(decoder_dims(hw, dx, d));
      m.pdec_y = Mlp(decoder_dims(hw, dy, d));
      break;
    }
    case ArchKind::Bidnn: {
      m.enc_x = Mlp(encoder_dims(dx, w, d), true);
      m.enc_y = Mlp(encoder_dims(dy, w, d), true);
      m.mixing = Mlp(stack_dims(w, d), true);
      // Central weights of the reverse direction are transposes of the
      // forward ones, in reversed layer order, sharing storage.
      m.mix_yx = Mlp(std::vector<std::size_t>{w}, true);
      for (std::size_t k = 0; k < d; ++k)
        m.mix_yx.push_layer(LinearLayer::transposed_view_of(m.mixing.layer(d - 1 - k)));
      m.dec_x = Mlp(decoder_dims(w, dx, d));
      m.dec_y = Mlp(decoder_dims(w, dy, d));
      break;
    }
    case ArchKind::Baseline: {
      m.enc_x = Mlp(encoder_dims(dx + dy, w, d), true);
      m.mixing = Mlp(stack_dims(w, d), true);
      break;
    }
  }
  m.head = Mlp({m.representation_width(), w, 2});
  return m;
}

inline std::size_t model_param_count(MultimodalModel& m, bool include_head = true) {
  return include_head ? param_count(m.parameters()) : param_count(m.representation_parameters());
}

/// Applies `scheme` to every component. Lsuv threads the calibration batches
/// through the network so each Mlp is calibrated on the activations it will
/// actually see.
inline void initialize_model(MultimodalModel& m, const InitScheme& scheme, std::uint64_t seed,
                             const Matrix* calib_x = nullptr, const Matrix* calib_y = nullptr) {
  Rng rng(seed);
  const bool lsuv = scheme.kind == InitKind::Lsuv;
  if (lsuv && (calib_x == nullptr || calib_y == nullptr))
    throw ConfigError("lsuv initialization requires calibration batches for both modalities");

  auto init = [&](Mlp& mlp, const Matrix* calib) {
    if (mlp.empty()) return;
    initialize(mlp, scheme, rng, calib);
  };

  if (!lsuv) {
    init(m.enc_x, nullptr);
    init(m.enc_y, nullptr);
    init(m.mixing, nullptr);
    init(m.mix_yx, nullptr);
    init(m.dec_x, nullptr);
    init(m.dec_y, nullptr);
    init(m.penc_x, nullptr);
    init(m.pdec_x, nullptr);
    init(m.penc_y, nullptr);
    init(m.pdec_y, nullptr);
    init(m.head, nullptr);
    return;
  }

  switch (m.kind) {
    case ArchKind::CorrNet: {
      init(m.enc_x, calib_x);
      init(m.enc_y, calib_y);
      const Matrix ex = m.enc_x.forward_inference(*calib_x);
      const Matrix ey = m.enc_y.forward_inference(*calib_y);
      const Matrix mix_in = ex + ey;
      init(m.mixing, &mix_in);
      const Matrix h = m.mixing.forward_inference(mix_in);
      init(m.dec_x, &h);
      init(m.dec_y, &h);
      init(m.head, &h);
      break;
    }
    case ArchKind::Jae: {
      init(m.enc_x, calib_x);
      init(m.enc_y, calib_y);
      const Matrix ex = m.enc_x.forward_inference(*calib_x);
      const Matrix ey = m.enc_y.forward_inference(*calib_y);
      const Matrix mix_in = ex + ey;
      init(m.mixing, &mix_in);
      const Matrix s = m.mixing.forward_inference(mix_in);
      init(m.penc_x, calib_x);
      init(m.penc_y, calib_y);
      const Matrix px = m.penc_x.forward_inference(*calib_x);
      const Matrix py = m.penc_y.forward_inference(*calib_y);
      const Matrix cat_x = hcat(px, s);
      const Matrix cat_y = hcat(py, s);
      init(m.dec_x, &cat_x);
      init(m.dec_y, &cat_y);
      init(m.pdec_x, &px);
      init(m.pdec_y, &py);
      init(m.head, &s);
      break;
    }
    case ArchKind::Bidnn: {
      init(m.enc_x, calib_x);
      const Matrix ex = m.enc_x.forward_inference(*calib_x);
      init(m.mixing, &ex);
      const Matrix cxy = m.mixing.forward_inference(ex);
      init(m.dec_y, &cxy);
      init(m.enc_y, calib_y);
      const Matrix ey = m.enc_y.forward_inference(*calib_y);
      init(m.mix_yx, &ey);  // tied weights keep the forward-direction init
      const Matrix cyx = m.mix_yx.forward_inference(ey);
      init(m.dec_x, &cyx);
      const Matrix rep = hcat(cxy, cyx);
      init(m.head, &rep);
      break;
    }
    case ArchKind::Baseline: {
      const Matrix cat = hcat(*calib_x, *calib_y);
      init(m.enc_x, &cat);
      const Matrix e = m.enc_x.forward_inference(cat);
      init(m.mixing, &e);
      const Matrix h = m.mixing.forward_inference(e);
      init(m.head, &h);
      break;
    }
  }
}

/// Parameter count of the parity-matched baseline at width `w`:
/// encoder (dim_x+dim_y)→w over `depth` layers, mixing w→w over `depth`
/// layers, then Linear(w→w) + Linear(w→2).
inline std::size_t baseline_param_count(std::size_t in_dim, std::size_t w, std::size_t depth) {
  std::size_t n = in_dim * w + w;                    // first encoder layer
  n += (depth - 1) * (w * w + w);                    // remaining encoder layers
  n += depth * (w * w + w);                          // mixing stack
  n += (w * w + w) + (2 * w + 2);                    // two classifier layers
  return n;
}

/// Integer-searches the baseline width whose parameter count lands within 2%
/// of `target_params` (the multimodal total including the head).
inline MultimodalModel build_baseline_matched(const ArchConfig& cfg, std::size_t target_params) {
  if (cfg.dim_x < 1 || cfg.dim_y < 1) throw ConfigError("modality dimensions must be positive");
  const std::size_t in_dim = cfg.dim_x + cfg.dim_y;
  const std::size_t w_max = 10 * cfg.layer_width;
  std::size_t best_w = 1;
  std::size_t best_diff = static_cast<std::size_t>(-1);
  for (std::size_t w = 1; w <= w_max; ++w) {
    const std::size_t n = baseline_param_count(in_dim, w, cfg.layer_depth);
    const std::size_t diff = n > target_params ? n - target_params : target_params - n;
    if (diff < best_diff) {
      best_diff = diff;
      best_w = w;
    }
  }
  const double rel = static_cast<double>(best_diff) / static_cast<double>(target_params);
  if (rel > 0.02) {
    throw ParityError("no baseline width within 2% of " + std::to_string(target_params) +
                      "; closest is width " + std::to_string(best_w) + " with " +
                      std::to_string(baseline_param_count(in_dim, best_w, cfg.layer_depth)) +
                      " parameters");
  }
  ArchConfig bcfg = cfg;
  bcfg.kind = ArchKind::Baseline;
  bcfg.layer_width = best_w;
  return build_model(bcfg);
}

}  // namespace flawnet
