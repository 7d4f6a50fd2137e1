#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "flawnet/dataset.hpp"
#include "flawnet/rng.hpp"

namespace flawnet {

/// Per-feature training statistics. Features whose sample standard deviation
/// is (relatively) zero are masked and normalize to exactly 0 in every split.
struct NormStats {
  std::vector<double> mean_x, std_x, mean_y, std_y;
  std::vector<bool> mask_x, mask_y;  // true = constant feature
};

namespace detail {

struct ColumnStats {
  std::vector<double> mean, sd;
  std::vector<bool> mask;
};

inline ColumnStats fit_columns(const Matrix& m, const std::vector<std::size_t>& rows) {
  const double n = static_cast<double>(rows.size());
  ColumnStats cs;
  cs.mean.assign(m.cols(), 0.0);
  cs.sd.assign(m.cols(), 0.0);
  cs.mask.assign(m.cols(), false);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double mean = 0.0;
    for (auto r : rows) mean += m(r, j);
    mean /= n;
    double q = 0.0;
    for (auto r : rows) {
      const double d = m(r, j) - mean;
      q += d * d;
    }
    const double sd = std::sqrt(q / (n - 1.0));
    cs.mean[j] = mean;
    cs.sd[j] = sd;
    cs.mask[j] = sd < 1e-12 * std::max(1.0, std::abs(mean));
  }
  return cs;
}

inline void apply_columns(Matrix& m, const ColumnStats& cs) {
  if (m.cols() != cs.mean.size()) throw ShapeError("apply_normalization: dimension mismatch");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (cs.mask[j]) m(i, j) = 0.0;
      else m(i, j) = (m(i, j) - cs.mean[j]) / cs.sd[j];
    }
  }
}

}  // namespace detail

/// Fits per-feature mean and sample standard deviation (n-1) from the
/// training rows only.
inline NormStats fit_normalization(const BimodalDataset& ds,
                                   const std::vector<std::size_t>& train_indices) {
  if (train_indices.size() < 2)
    throw DataError("fit_normalization: need at least 2 training rows");
  for (auto r : train_indices)
    if (r >= ds.size()) throw DataError("fit_normalization: training index out of range");
  const auto cx = detail::fit_columns(ds.x, train_indices);
  const auto cy = detail::fit_columns(ds.y, train_indices);
  return {cx.mean, cx.sd, cy.mean, cy.sd, cx.mask, cy.mask};
}

/// Z-scores every row with the training statistics. Not idempotent: applying
/// it twice rescales by the training statistics twice, so normalize once.
inline BimodalDataset apply_normalization(const BimodalDataset& ds, const NormStats& stats) {
  BimodalDataset out;
  out.ids = ds.ids;
  out.labels = ds.labels;
  out.x_names = ds.x_names;
  out.y_names = ds.y_names;
  out.x = ds.x;
  out.y = ds.y;
  detail::apply_columns(out.x, {stats.mean_x, stats.std_x, stats.mask_x});
  detail::apply_columns(out.y, {stats.mean_y, stats.std_y, stats.mask_y});
  return out;
}

struct Fold {
  std::vector<std::size_t> train, val, test;
};

/// Deterministic 5-fold 80/10/10 plan: indices are shuffled once, cut into
/// ten near-equal deciles, and fold i takes decile 2i as test and 2i+1 as
/// validation. Test sets are therefore pairwise disjoint across folds.
struct FoldPlan {
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
};

inline FoldPlan make_folds(std::size_t n, std::uint64_t seed) {
  if (n < 10) throw DataError("make_folds: need at least 10 instances");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);

  std::vector<std::vector<std::size_t>> deciles(10);
  std::size_t off = 0;
  for (std::size_t d = 0; d < 10; ++d) {
    const std::size_t len = n / 10 + (d < n % 10 ? 1 : 0);
    deciles[d].assign(perm.begin() + off, perm.begin() + off + len);
    off += len;
  }

  FoldPlan plan;
  plan.seed = seed;
  for (std::size_t f = 0; f < 5; ++f) {
    Fold fold;
    fold.test = deciles[2 * f];
    fold.val = deciles[2 * f + 1];
    for (std::size_t d = 0; d < 10; ++d) {
      if (d == 2 * f || d == 2 * f + 1) continue;
      fold.train.insert(fold.train.end(), deciles[d].begin(), deciles[d].end());
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.val.begin(), fold.val.end());
    std::sort(fold.test.begin(), fold.test.end());
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

/// Triples the dataset: the original rows, a copy with the y block zeroed,
/// and a copy with the x block zeroed. Labels are copied unchanged.
inline BimodalDataset augment_single_modality(const BimodalDataset& ds) {
  BimodalDataset out;
  out.x_names = ds.x_names;
  out.y_names = ds.y_names;
  out.ids.reserve(3 * ds.size());
  out.labels.reserve(3 * ds.size());
  for (int copy = 0; copy < 3; ++copy) {
    out.ids.insert(out.ids.end(), ds.ids.begin(), ds.ids.end());
    out.labels.insert(out.labels.end(), ds.labels.begin(), ds.labels.end());
  }
  const Matrix zx(ds.size(), ds.dim_x());
  const Matrix zy(ds.size(), ds.dim_y());
  out.x = vcat(vcat(ds.x, ds.x), zx);
  out.y = vcat(vcat(ds.y, zy), ds.y);
  return out;
}

}  // namespace flawnet
