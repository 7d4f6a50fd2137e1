#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flawnet/adam.hpp"
#include "flawnet/datapipe.hpp"
#include "flawnet/metrics.hpp"
#include "flawnet/objectives.hpp"

namespace flawnet {

/// Mini-batches smaller than this are folded into the previous batch so the
/// within-batch correlation estimate stays usable.
inline constexpr std::size_t kMinBatchRows = 8;

/// Curves and outcome of training one model on one fold.
struct TrainReport {
  ArchConfig config;
  std::uint64_t seed = 0;
  double lambda_resolved = 0.0;  // CorrNet only
  std::vector<double> rep_train_loss, rep_val_loss;
  std::size_t rep_selected_epoch = 0;  // argmin of rep_val_loss
  std::vector<double> head_train_loss, head_val_accuracy;
  std::size_t head_selected_epoch = 0;  // argmax of head_val_accuracy
  double test_balanced_accuracy = 0.0;
  double test_balanced_accuracy_x_only = 0.0;  // y modality zeroed at test time
};

namespace detail {

inline std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                          Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t off = 0; off < n; off += batch_size) {
    const std::size_t len = std::min(batch_size, n - off);
    batches.emplace_back(order.begin() + off, order.begin() + off + len);
  }
  if (batches.size() >= 2 && batches.back().size() < kMinBatchRows) {
    auto tail = std::move(batches.back());
    batches.pop_back();
    batches.back().insert(batches.back().end(), tail.begin(), tail.end());
  }
  return batches;
}

inline void require_finite(double loss, std::size_t epoch, std::size_t batch) {
  if (!std::isfinite(loss))
    throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                       std::to_string(batch));
}

struct HeadCurves {
  std::vector<double> train_loss;
  std::vector<double> val_accuracy;
  std::size_t selected_epoch = 0;
};

/// Trains `head` on fixed embeddings with class-weighted cross-entropy.
/// When validation data is given, parameters are checkpointed at the best
/// validation balanced accuracy and restored before returning.
inline HeadCurves fit_head(Mlp& head, const Matrix& emb_train, const std::vector<int>& lab_train,
                           const std::array<double, 2>& class_weights, std::size_t epochs,
                           double lr, std::size_t batch_size, Rng& rng,
                           const Matrix* emb_val = nullptr,
                           const std::vector<int>* lab_val = nullptr) {
  std::vector<ParamRef> params;
  head.collect_params("head", params);
  Adam adam({lr});
  HeadCurves curves;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> best_snap;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const auto batches = make_batches(emb_train.rows(), batch_size, rng);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Matrix eb = gather_rows(emb_train, batches[b]);
      std::vector<int> lb(batches[b].size());
      for (std::size_t i = 0; i < batches[b].size(); ++i) lb[i] = lab_train[batches[b][i]];
      MlpTrace trace;
      const Matrix logits = head.forward(eb, trace);
      const auto ce = weighted_cross_entropy(logits, lb, class_weights);
      require_finite(ce.value, epoch, b);
      GradStore gs;
      head.backward(trace, ce.grad, gs);
      adam.step(params, gs.aligned(params));
      epoch_loss += ce.value * static_cast<double>(batches[b].size());
    }
    curves.train_loss.push_back(epoch_loss / static_cast<double>(emb_train.rows()));
    if (emb_val != nullptr) {
      const Matrix probs = softmax_rows(head.forward_inference(*emb_val));
      const double acc = balanced_accuracy(argmax_labels(probs), *lab_val);
      curves.val_accuracy.push_back(acc);
      if (acc > best) {
        best = acc;
        best_snap = snapshot_params(params);
        curves.selected_epoch = epoch;
      }
    }
  }
  if (!best_snap.empty()) restore_params(params, best_snap);
  return curves;
}

}  // namespace detail

/// Trains the classification head on frozen embeddings with inverse-class
/// weighted cross-entropy (all rows used for fitting, no validation split).
inline detail::HeadCurves train_head(MultimodalModel& model, const Matrix& embeddings,
                                     const std::vector<int>& labels,
                                     const std::array<double, 2>& class_weights,
                                     std::size_t epochs = 100, double lr = 1e-3,
                                     std::size_t batch_size = 256, std::uint64_t seed = 1) {
  bool seen[2] = {false, false};
  for (int l : labels) seen[l != 0] = true;
  if (!seen[0] || !seen[1]) throw DataError("train_head: labels contain a single class");
  if (embeddings.rows() != labels.size())
    throw ShapeError("train_head: embedding/label counts differ");
  Rng rng(seed);
  return detail::fit_head(model.head, embeddings, labels, class_weights, epochs, lr, batch_size,
                          rng);
}

/// Class probabilities from the trained head.
inline Matrix head_predict(const MultimodalModel& model, const Matrix& embeddings) {
  return softmax_rows(model.head.forward_inference(embeddings));
}

struct TrainOutcome {
  TrainReport report;
  MultimodalModel model;
};

/// Trains one architecture on one fold of a normalized dataset.
///
/// Multimodal kinds run two phases: the representation loss is minimized
/// with Adam over mini-batches, checkpointing at the best validation loss;
/// then the representation is frozen and the head is trained with
/// class-weighted cross-entropy, checkpointing at the best validation
/// balanced accuracy. The baseline trains end-to-end supervised in a single
/// phase. Test rows are touched exactly once, after all selection.
inline TrainOutcome train_model_full(const ArchConfig& cfg_in, const BimodalDataset& ds,
                                     const Fold& fold) {
  ArchConfig cfg = cfg_in;
  cfg.dim_x = ds.dim_x();
  cfg.dim_y = ds.dim_y();
  cfg.validate();
  for (const auto* part : {&fold.train, &fold.val, &fold.test})
    for (auto idx : *part)
      if (idx >= ds.size()) throw DataError("train_model: fold index out of range");

  Matrix x_train = gather_rows(ds.x, fold.train);
  Matrix y_train = gather_rows(ds.y, fold.train);
  std::vector<int> lab_train;
  for (auto i : fold.train) lab_train.push_back(ds.labels[i]);
  if (cfg.augment_train) {
    BimodalDataset block;
    block.ids.assign(fold.train.size(), "");
    block.x = std::move(x_train);
    block.y = std::move(y_train);
    block.labels = lab_train;
    block.x_names.assign(ds.dim_x(), "");
    block.y_names.assign(ds.dim_y(), "");
    BimodalDataset aug = augment_single_modality(block);
    x_train = std::move(aug.x);
    y_train = std::move(aug.y);
    lab_train = std::move(aug.labels);
  }
  const Matrix x_val = gather_rows(ds.x, fold.val);
  const Matrix y_val = gather_rows(ds.y, fold.val);
  std::vector<int> lab_val;
  for (auto i : fold.val) lab_val.push_back(ds.labels[i]);

  TrainOutcome out;
  out.model = build_model(cfg);
  MultimodalModel& model = out.model;
  TrainReport& report = out.report;
  report.config = cfg;
  report.seed = cfg.seed;

  const std::size_t calib_rows = std::min(cfg.batch_size, x_train.rows());
  std::vector<std::size_t> head_rows(calib_rows);
  std::iota(head_rows.begin(), head_rows.end(), 0);
  const Matrix calib_x = gather_rows(x_train, head_rows);
  const Matrix calib_y = gather_rows(y_train, head_rows);
  initialize_model(model, cfg.init, cfg.seed, &calib_x, &calib_y);

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  if (cfg.kind == ArchKind::Baseline) {
    // Single supervised phase over the whole network.
    const auto class_weights = inverse_class_weights(lab_train);
    std::vector<ParamRef> params = model.parameters();
    Adam adam({cfg.learning_rate});
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> best_snap;
    const Matrix cat_train = hcat(x_train, y_train);
    const Matrix cat_val = hcat(x_val, y_val);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      const auto batches = detail::make_batches(cat_train.rows(), cfg.batch_size, rng);
      double epoch_loss = 0.0;
      for (std::size_t b = 0; b < batches.size(); ++b) {
        const Matrix xb = gather_rows(cat_train, batches[b]);
        std::vector<int> lb(batches[b].size());
        for (std::size_t i = 0; i < batches[b].size(); ++i) lb[i] = lab_train[batches[b][i]];
        MlpTrace te, tm, th;
        const Matrix h = model.mixing.forward(model.enc_x.forward(xb, te), tm);
        const Matrix logits = model.head.forward(h, th);
        const auto ce = weighted_cross_entropy(logits, lb, class_weights);
        detail::require_finite(ce.value, epoch, b);
        GradStore gs;
        const Matrix dh = model.head.backward(th, ce.grad, gs);
        model.enc_x.backward(te, model.mixing.backward(tm, dh, gs), gs);
        adam.step(params, gs.aligned(params));
        epoch_loss += ce.value * static_cast<double>(batches[b].size());
      }
      report.head_train_loss.push_back(epoch_loss / static_cast<double>(cat_train.rows()));
      const Matrix probs = head_predict(
          model, model.mixing.forward_inference(model.enc_x.forward_inference(cat_val)));
      const double acc = balanced_accuracy(argmax_labels(probs), lab_val);
      report.head_val_accuracy.push_back(acc);
      if (acc > best) {
        best = acc;
        best_snap = snapshot_params(params);
        report.head_selected_epoch = epoch;
      }
    }
    restore_params(params, best_snap);
  } else {
    // Phase A: representation.
    double lambda = 0.0;
    if (cfg.kind == ArchKind::CorrNet) {
      lambda = cfg.lambda_auto ? auto_lambda(model, calib_x, calib_y) : cfg.lambda;
      report.lambda_resolved = lambda;
    }
    std::vector<ParamRef> rep_params = model.representation_parameters();
    Adam adam({cfg.learning_rate});
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_snap;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      const auto batches = detail::make_batches(x_train.rows(), cfg.batch_size, rng);
      double epoch_loss = 0.0;
      for (std::size_t b = 0; b < batches.size(); ++b) {
        const Matrix xb = gather_rows(x_train, batches[b]);
        const Matrix yb = gather_rows(y_train, batches[b]);
        const auto loss = representation_loss(model, xb, yb, lambda);
        detail::require_finite(loss.value, epoch, b);
        adam.step(rep_params, loss.grads.aligned(rep_params));
        epoch_loss += loss.value * static_cast<double>(batches[b].size());
      }
      report.rep_train_loss.push_back(epoch_loss / static_cast<double>(x_train.rows()));
      const double val_loss = representation_loss_value(model, x_val, y_val, lambda);
      detail::require_finite(val_loss, epoch, 0);
      report.rep_val_loss.push_back(val_loss);
      if (val_loss < best_val) {
        best_val = val_loss;
        best_snap = snapshot_params(rep_params);
        report.rep_selected_epoch = epoch;
      }
    }
    restore_params(rep_params, best_snap);

    // Phase B: frozen representation, supervised head.
    const auto class_weights = inverse_class_weights(lab_train);
    const Matrix emb_train = embed(model, x_train, y_train);
    const Matrix emb_val = embed(model, x_val, y_val);
    const auto curves =
        detail::fit_head(model.head, emb_train, lab_train, class_weights, cfg.epochs,
                         cfg.learning_rate, cfg.batch_size, rng, &emb_val, &lab_val);
    report.head_train_loss = curves.train_loss;
    report.head_val_accuracy = curves.val_accuracy;
    report.head_selected_epoch = curves.selected_epoch;
  }

  // Final evaluation: the only pass over the test rows.
  const Matrix x_test = gather_rows(ds.x, fold.test);
  const Matrix y_test = gather_rows(ds.y, fold.test);
  std::vector<int> lab_test;
  for (auto i : fold.test) lab_test.push_back(ds.labels[i]);
  const Matrix probs = head_predict(model, embed(model, x_test, y_test));
  report.test_balanced_accuracy = balanced_accuracy(argmax_labels(probs), lab_test);
  const Matrix probs_x_only = head_predict(model, embed(model, &x_test, nullptr));
  report.test_balanced_accuracy_x_only =
      balanced_accuracy(argmax_labels(probs_x_only), lab_test);
  return out;
}

inline TrainReport train_model(const ArchConfig& cfg, const BimodalDataset& ds,
                               const Fold& fold) {
  return train_model_full(cfg, ds, fold).report;
}

}  // namespace flawnet
