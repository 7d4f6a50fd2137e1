#pragma once

#include <algorithm>
#include <cmath>

#include "flawnet/loss.hpp"
#include "flawnet/model.hpp"

namespace flawnet {

struct LossResult {
  double value = 0.0;
  GradStore grads;
};

/// Forward activations of the CorrNet graph, including the two
/// single-modality passes where the other modality's input is a zero batch.
struct CorrnetForward {
  MlpTrace enc_x_real, enc_x_zero, enc_y_real, enc_y_zero;
  MlpTrace mix_joint, mix_x, mix_y;
  MlpTrace dec_x_joint, dec_x_xonly, dec_x_yonly;
  MlpTrace dec_y_joint, dec_y_xonly, dec_y_yonly;
  Matrix h_joint, h_x, h_y;
  Matrix rx_joint, rx_xonly, rx_yonly;  // dec_x outputs per code
  Matrix ry_joint, ry_xonly, ry_yonly;  // dec_y outputs per code
};

/// Per-term values of the CorrNet objective on one batch.
struct CorrnetTerms {
  double recon_joint_x = 0.0, recon_joint_y = 0.0;
  double recon_xonly_x = 0.0, recon_xonly_y = 0.0;
  double recon_yonly_x = 0.0, recon_yonly_y = 0.0;
  double correlation = 0.0;

  double reconstruction_sum() const {
    return recon_joint_x + recon_joint_y + recon_xonly_x + recon_xonly_y + recon_yonly_x +
           recon_yonly_y;
  }
};

namespace detail {

inline void check_batch(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows()) throw ShapeError("modality batches have different row counts");
  if (x.cols() != m.config.dim_x || y.cols() != m.config.dim_y)
    throw ShapeError("batch feature dims do not match the model's modality dims");
}

inline CorrnetForward corrnet_forward(const MultimodalModel& m, const Matrix& x,
                                      const Matrix& y) {
  CorrnetForward f;
  const Matrix x0(x.rows(), x.cols());
  const Matrix y0(y.rows(), y.cols());
  const Matrix ex = m.enc_x.forward(x, f.enc_x_real);
  const Matrix ex0 = m.enc_x.forward(x0, f.enc_x_zero);
  const Matrix ey = m.enc_y.forward(y, f.enc_y_real);
  const Matrix ey0 = m.enc_y.forward(y0, f.enc_y_zero);
  f.h_joint = m.mixing.forward(ex + ey, f.mix_joint);
  f.h_x = m.mixing.forward(ex + ey0, f.mix_x);
  f.h_y = m.mixing.forward(ex0 + ey, f.mix_y);
  f.rx_joint = m.dec_x.forward(f.h_joint, f.dec_x_joint);
  f.rx_xonly = m.dec_x.forward(f.h_x, f.dec_x_xonly);
  f.rx_yonly = m.dec_x.forward(f.h_y, f.dec_x_yonly);
  f.ry_joint = m.dec_y.forward(f.h_joint, f.dec_y_joint);
  f.ry_xonly = m.dec_y.forward(f.h_x, f.dec_y_xonly);
  f.ry_yonly = m.dec_y.forward(f.h_y, f.dec_y_yonly);
  return f;
}

}  // namespace detail

/// Evaluates each CorrNet loss term without gradients.
inline CorrnetTerms corrnet_terms(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  if (m.kind != ArchKind::CorrNet) throw ConfigError("corrnet_terms requires a CorrNet model");
  detail::check_batch(m, x, y);
  const auto f = detail::corrnet_forward(m, x, y);
  CorrnetTerms t;
  t.recon_joint_x = mse_value(f.rx_joint, x);
  t.recon_joint_y = mse_value(f.ry_joint, y);
  t.recon_xonly_x = mse_value(f.rx_xonly, x);
  t.recon_xonly_y = mse_value(f.ry_xonly, y);
  t.recon_yonly_x = mse_value(f.rx_yonly, x);
  t.recon_yonly_y = mse_value(f.ry_yonly, y);
  t.correlation = correlation_value(f.h_x, f.h_y);
  return t;
}

/// Reconstruction from the joint code and from each single-modality code
/// (the other modality's input zeroed), minus lambda times the per-dimension
/// correlation between the two single-modality codes.
inline LossResult corrnet_loss(const MultimodalModel& m, const Matrix& x, const Matrix& y,
                               double lambda) {
  if (m.kind != ArchKind::CorrNet) throw ConfigError("corrnet_loss requires a CorrNet model");
  if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
  detail::check_batch(m, x, y);
  const auto f = detail::corrnet_forward(m, x, y);

  const auto mse_jx = mse_loss(f.rx_joint, x);
  const auto mse_jy = mse_loss(f.ry_joint, y);
  const auto mse_xx = mse_loss(f.rx_xonly, x);
  const auto mse_xy = mse_loss(f.ry_xonly, y);
  const auto mse_yx = mse_loss(f.rx_yonly, x);
  const auto mse_yy = mse_loss(f.ry_yonly, y);
  const auto corr = correlation_loss(f.h_x, f.h_y);

  LossResult out;
  out.value = mse_jx.value + mse_jy.value + mse_xx.value + mse_xy.value + mse_yx.value +
              mse_yy.value - lambda * corr.value;
  auto& gs = out.grads;

  Matrix dh_joint = m.dec_x.backward(f.dec_x_joint, mse_jx.grad, gs);
  dh_joint += m.dec_y.backward(f.dec_y_joint, mse_jy.grad, gs);
  Matrix dh_x = m.dec_x.backward(f.dec_x_xonly, mse_xx.grad, gs);
  dh_x += m.dec_y.backward(f.dec_y_xonly, mse_xy.grad, gs);
  Matrix dh_y = m.dec_x.backward(f.dec_x_yonly, mse_yx.grad, gs);
  dh_y += m.dec_y.backward(f.dec_y_yonly, mse_yy.grad, gs);
  if (lambda != 0.0) {
    dh_x += (-lambda) * corr.grad_x;
    dh_y += (-lambda) * corr.grad_y;
  }

  const Matrix dsum_joint = m.mixing.backward(f.mix_joint, dh_joint, gs);
  const Matrix dsum_x = m.mixing.backward(f.mix_x, dh_x, gs);
  const Matrix dsum_y = m.mixing.backward(f.mix_y, dh_y, gs);

  m.enc_x.backward(f.enc_x_real, dsum_joint + dsum_x, gs);
  m.enc_x.backward(f.enc_x_zero, dsum_y, gs);
  m.enc_y.backward(f.enc_y_real, dsum_joint + dsum_y, gs);
  m.enc_y.backward(f.enc_y_zero, dsum_x, gs);
  return out;
}

inline double corrnet_loss_value(const MultimodalModel& m, const Matrix& x, const Matrix& y,
                                 double lambda) {
  const auto t = corrnet_terms(m, x, y);
  return t.reconstruction_sum() - lambda * t.correlation;
}

/// Equalizes the reconstruction terms against the correlation term on a
/// sample batch: lambda = recon_sum / max(|corr|, 1e-12).
inline double auto_lambda(const MultimodalModel& m, const Matrix& sample_x,
                          const Matrix& sample_y) {
  const auto t = corrnet_terms(m, sample_x, sample_y);
  return t.reconstruction_sum() / std::max(std::abs(t.correlation), 1e-12);
}

/// Shared code s = mixing(enc_x(x)+enc_y(y)); private codes p_x, p_y.
/// Reconstruction from concat(private, shared) per modality plus
/// private-only reconstruction per modality.
inline LossResult jae_loss(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  if (m.kind != ArchKind::Jae) throw ConfigError("jae_loss requires a JAE model");
  detail::check_batch(m, x, y);

  MlpTrace tex, tey, tmix, tpex, tpey, tdx, tdy, tpdx, tpdy;
  const Matrix ex = m.enc_x.forward(x, tex);
  const Matrix ey = m.enc_y.forward(y, tey);
  const Matrix s = m.mixing.forward(ex + ey, tmix);
  const Matrix px = m.penc_x.forward(x, tpex);
  const Matrix py = m.penc_y.forward(y, tpey);
  const Matrix cat_x = hcat(px, s);
  const Matrix cat_y = hcat(py, s);
  const Matrix rx = m.dec_x.forward(cat_x, tdx);
  const Matrix ry = m.dec_y.forward(cat_y, tdy);
  const Matrix prx = m.pdec_x.forward(px, tpdx);
  const Matrix pry = m.pdec_y.forward(py, tpdy);

  const auto mse_x = mse_loss(rx, x);
  const auto mse_y = mse_loss(ry, y);
  const auto mse_px = mse_loss(prx, x);
  const auto mse_py = mse_loss(pry, y);

  LossResult out;
  out.value = mse_x.value + mse_y.value + mse_px.value + mse_py.value;
  auto& gs = out.grads;

  const std::size_t hw = px.cols();
  const Matrix dcat_x = m.dec_x.backward(tdx, mse_x.grad, gs);
  const Matrix dcat_y = m.dec_y.backward(tdy, mse_y.grad, gs);
  Matrix dpx = slice_cols(dcat_x, 0, hw);
  Matrix dpy = slice_cols(dcat_y, 0, hw);
  Matrix ds = slice_cols(dcat_x, hw, dcat_x.cols());
  ds += slice_cols(dcat_y, hw, dcat_y.cols());
  dpx += m.pdec_x.backward(tpdx, mse_px.grad, gs);
  dpy += m.pdec_y.backward(tpdy, mse_py.grad, gs);

  const Matrix dsum = m.mixing.backward(tmix, ds, gs);
  m.enc_x.backward(tex, dsum, gs);
  m.enc_y.backward(tey, dsum, gs);
  m.penc_x.backward(tpex, dpx, gs);
  m.penc_y.backward(tpey, dpy, gs);
  return out;
}

inline double jae_loss_value(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  if (m.kind != ArchKind::Jae) throw ConfigError("jae_loss requires a JAE model");
  detail::check_batch(m, x, y);
  const Matrix s = m.mixing.forward_inference(m.enc_x.forward_inference(x) +
                                              m.enc_y.forward_inference(y));
  const Matrix px = m.penc_x.forward_inference(x);
  const Matrix py = m.penc_y.forward_inference(y);
  return mse_value(m.dec_x.forward_inference(hcat(px, s)), x) +
         mse_value(m.dec_y.forward_inference(hcat(py, s)), y) +
         mse_value(m.pdec_x.forward_inference(px), x) +
         mse_value(m.pdec_y.forward_inference(py), y);
}

/// Translation losses of both directions. Gradients w.r.t. the tied central
/// weights accumulate from both directions into the shared storage.
inline LossResult bidnn_loss(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  if (m.kind != ArchKind::Bidnn) throw ConfigError("bidnn_loss requires a BiDNN model");
  detail::check_batch(m, x, y);

  MlpTrace tex, tmx, tdy, tey, tmy, tdx;
  const Matrix cxy = m.mixing.forward(m.enc_x.forward(x, tex), tmx);
  const Matrix yhat = m.dec_y.forward(cxy, tdy);
  const Matrix cyx = m.mix_yx.forward(m.enc_y.forward(y, tey), tmy);
  const Matrix xhat = m.dec_x.forward(cyx, tdx);

  const auto mse_y = mse_loss(yhat, y);
  const auto mse_x = mse_loss(xhat, x);

  LossResult out;
  out.value = mse_y.value + mse_x.value;
  auto& gs = out.grads;
  m.enc_x.backward(tex, m.mixing.backward(tmx, m.dec_y.backward(tdy, mse_y.grad, gs), gs), gs);
  m.enc_y.backward(tey, m.mix_yx.backward(tmy, m.dec_x.backward(tdx, mse_x.grad, gs), gs), gs);
  return out;
}

inline double bidnn_loss_value(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  if (m.kind != ArchKind::Bidnn) throw ConfigError("bidnn_loss requires a BiDNN model");
  detail::check_batch(m, x, y);
  const Matrix yhat = m.dec_y.forward_inference(
      m.mixing.forward_inference(m.enc_x.forward_inference(x)));
  const Matrix xhat = m.dec_x.forward_inference(
      m.mix_yx.forward_inference(m.enc_y.forward_inference(y)));
  return mse_value(yhat, y) + mse_value(xhat, x);
}

/// Representation loss of the model's kind, without gradients. Baseline has
/// no unsupervised representation loss.
inline double representation_loss_value(const MultimodalModel& m, const Matrix& x,
                                        const Matrix& y, double lambda) {
  switch (m.kind) {
    case ArchKind::CorrNet: return corrnet_loss_value(m, x, y, lambda);
    case ArchKind::Jae: return jae_loss_value(m, x, y);
    case ArchKind::Bidnn: return bidnn_loss_value(m, x, y);
    case ArchKind::Baseline:
      throw ConfigError("baseline has no representation loss");
  }
  throw ConfigError("unknown architecture");
}

inline LossResult representation_loss(const MultimodalModel& m, const Matrix& x, const Matrix& y,
                                      double lambda) {
  switch (m.kind) {
    case ArchKind::CorrNet: return corrnet_loss(m, x, y, lambda);
    case ArchKind::Jae: return jae_loss(m, x, y);
    case ArchKind::Bidnn: return bidnn_loss(m, x, y);
    case ArchKind::Baseline:
      throw ConfigError("baseline has no representation loss");
  }
  throw ConfigError("unknown architecture");
}

/// Joint representation for a batch. A missing modality is replaced by a
/// zero batch (CorrNet/JAE/Baseline); BiDNN instead duplicates the available
/// direction's central activation into both slots.
inline Matrix embed(const MultimodalModel& m, const Matrix* x, const Matrix* y) {
  if (x == nullptr && y == nullptr)
    throw ConfigError("embed requires at least one modality");
  if (x != nullptr && y != nullptr && x->rows() != y->rows())
    throw ShapeError("modality batches have different row counts");
  const std::size_t rows = x != nullptr ? x->rows() : y->rows();
  if (x != nullptr && x->cols() != m.config.dim_x)
    throw ShapeError("x batch width does not match the model");
  if (y != nullptr && y->cols() != m.config.dim_y)
    throw ShapeError("y batch width does not match the model");

  if (m.kind == ArchKind::Bidnn) {
    if (x != nullptr && y != nullptr) {
      const Matrix cxy = m.mixing.forward_inference(m.enc_x.forward_inference(*x));
      const Matrix cyx = m.mix_yx.forward_inference(m.enc_y.forward_inference(*y));
      return hcat(cxy, cyx);
    }
    if (x != nullptr) {
      const Matrix cxy = m.mixing.forward_inference(m.enc_x.forward_inference(*x));
      return hcat(cxy, cxy);
    }
    const Matrix cyx = m.mix_yx.forward_inference(m.enc_y.forward_inference(*y));
    return hcat(cyx, cyx);
  }

  const Matrix zx(rows, m.config.dim_x);
  const Matrix zy(rows, m.config.dim_y);
  const Matrix& bx = x != nullptr ? *x : zx;
  const Matrix& by = y != nullptr ? *y : zy;
  if (m.kind == ArchKind::Baseline)
    return m.mixing.forward_inference(m.enc_x.forward_inference(hcat(bx, by)));
  return m.mixing.forward_inference(m.enc_x.forward_inference(bx) +
                                    m.enc_y.forward_inference(by));
}

inline Matrix embed(const MultimodalModel& m, const Matrix& x, const Matrix& y) {
  return embed(m, &x, &y);
}

}  // namespace flawnet
