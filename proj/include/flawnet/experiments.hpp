#pragma once

#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "flawnet/training.hpp"

namespace flawnet {

/// Per-fold reports plus the cross-fold aggregate.
struct CvReport {
  ArchConfig config;
  std::uint64_t seed = 0;  // fold-plan seed
  std::vector<TrainReport> folds;
  double mean_test_balanced_accuracy = 0.0;
  double std_test_balanced_accuracy = 0.0;  // sample std (n-1)
  double mean_test_balanced_accuracy_x_only = 0.0;
};

namespace detail {

template <typename Fn>
inline auto tag_fold_errors(std::size_t fold_index, Fn&& fn) {
  const std::string tag = "fold " + std::to_string(fold_index) + ": ";
  try {
    return fn();
  } catch (const NumericError& e) {
    throw NumericError(tag + e.what());
  } catch (const DataError& e) {
    throw DataError(tag + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(tag + e.what());
  } catch (const Error& e) {
    throw Error(tag + e.what());
  }
}

}  // namespace detail

/// 5-fold cross validation: builds the fold plan from `seed`, fits the
/// normalization on each fold's training rows only, trains, and aggregates
/// mean ± sample standard deviation of test balanced accuracy.
inline CvReport run_cv(const ArchConfig& cfg, const BimodalDataset& ds, std::uint64_t seed,
                       std::size_t cell_index = 0) {
  const FoldPlan plan = make_folds(ds.size(), seed);
  CvReport cv;
  cv.config = cfg;
  cv.config.dim_x = ds.dim_x();
  cv.config.dim_y = ds.dim_y();
  cv.seed = seed;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    cv.folds.push_back(detail::tag_fold_errors(f, [&] {
      const NormStats stats = fit_normalization(ds, plan.folds[f].train);
      const BimodalDataset nds = apply_normalization(ds, stats);
      ArchConfig fold_cfg = cfg;
      fold_cfg.seed = seed + f + cell_index;
      return train_model(fold_cfg, nds, plan.folds[f]);
    }));
  }
  const double n = static_cast<double>(cv.folds.size());
  double mean = 0.0, mean_x = 0.0;
  for (const auto& r : cv.folds) {
    mean += r.test_balanced_accuracy;
    mean_x += r.test_balanced_accuracy_x_only;
  }
  mean /= n;
  mean_x /= n;
  double q = 0.0;
  for (const auto& r : cv.folds) {
    const double d = r.test_balanced_accuracy - mean;
    q += d * d;
  }
  cv.mean_test_balanced_accuracy = mean;
  cv.mean_test_balanced_accuracy_x_only = mean_x;
  cv.std_test_balanced_accuracy = n > 1 ? std::sqrt(q / (n - 1.0)) : 0.0;
  return cv;
}

enum class SweepKind { Size, Init, Lambda, SingleMulti };

inline std::string to_string(SweepKind k) {
  switch (k) {
    case SweepKind::Size: return "size";
    case SweepKind::Init: return "init";
    case SweepKind::Lambda: return "lambda";
    case SweepKind::SingleMulti: return "singlemulti";
  }
  return "size";
}

inline SweepKind parse_sweep_kind(const std::string& s) {
  if (s == "size") return SweepKind::Size;
  if (s == "init") return SweepKind::Init;
  if (s == "lambda") return SweepKind::Lambda;
  if (s == "singlemulti") return SweepKind::SingleMulti;
  throw ConfigError("unknown sweep kind '" + s + "'");
}

/// Grid of cross-validation runs: rows are the swept values, columns the
/// architectures.
struct SweepTable {
  SweepKind kind = SweepKind::Size;
  ArchConfig base;
  std::uint64_t seed = 0;
  std::string row_header;
  std::vector<std::string> row_labels;
  std::vector<ArchKind> archs;
  std::vector<std::vector<CvReport>> cells;  // [row][arch]
};

namespace detail {

struct SweepCellSpec {
  std::size_t row = 0, col = 0;
  ArchConfig cfg;
};

inline std::vector<SweepCellSpec> sweep_cells(SweepTable& table, const ArchConfig& base) {
  std::vector<SweepCellSpec> specs;
  const std::vector<ArchKind> multimodal{ArchKind::CorrNet, ArchKind::Jae, ArchKind::Bidnn};
  switch (table.kind) {
    case SweepKind::Size: {
      table.row_header = "(layer size x layer depth)";
      const std::vector<std::pair<std::size_t, std::size_t>> sizes{
          {50, 1}, {100, 1}, {500, 1}, {100, 2}, {50, 4}};
      table.archs = multimodal;
      for (const auto& [w, d] : sizes)
        table.row_labels.push_back(std::to_string(w) + "x" + std::to_string(d));
      for (std::size_t r = 0; r < sizes.size(); ++r) {
        for (std::size_t c = 0; c < table.archs.size(); ++c) {
          ArchConfig cfg = base;
          cfg.kind = table.archs[c];
          cfg.layer_width = sizes[r].first;
          cfg.layer_depth = sizes[r].second;
          cfg.lambda = 0.0;  // size comparison runs without the correlation term
          cfg.lambda_auto = false;
          specs.push_back({r, c, cfg});
        }
      }
      break;
    }
    case SweepKind::Init: {
      table.row_header = "Initialization";
      const std::vector<InitScheme> schemes{InitScheme::constant_fill(0.1),
                                            InitScheme::kaiming(), InitScheme::xavier(),
                                            InitScheme::lsuv()};
      table.archs = multimodal;
      for (const auto& s : schemes) table.row_labels.push_back(to_string(s));
      for (std::size_t r = 0; r < schemes.size(); ++r) {
        for (std::size_t c = 0; c < table.archs.size(); ++c) {
          ArchConfig cfg = base;
          cfg.kind = table.archs[c];
          cfg.init = schemes[r];
          specs.push_back({r, c, cfg});
        }
      }
      break;
    }
    case SweepKind::Lambda: {
      if (base.kind != ArchKind::CorrNet)
        throw ConfigError("lambda sweep requires corrnet");
      table.row_header = "lambda";
      table.archs = {ArchKind::CorrNet};
      const std::vector<double> lambdas{0.0, 0.01, 0.1, 1.0, 10.0};
      for (std::size_t r = 0; r < lambdas.size(); ++r) {
        table.row_labels.push_back(format_double(lambdas[r]));
        ArchConfig cfg = base;
        cfg.lambda = lambdas[r];
        cfg.lambda_auto = false;
        specs.push_back({r, 0, cfg});
      }
      table.row_labels.push_back("auto");
      ArchConfig cfg = base;
      cfg.lambda_auto = true;
      specs.push_back({lambdas.size(), 0, cfg});
      break;
    }
    case SweepKind::SingleMulti: {
      table.row_header = "Model Inputs";
      table.archs = multimodal;
      table.row_labels = {"Single+Multimodal", "Multimodal"};
      for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < table.archs.size(); ++c) {
          ArchConfig cfg = base;
          cfg.kind = table.archs[c];
          cfg.augment_train = r == 0;
          specs.push_back({r, c, cfg});
        }
      }
      break;
    }
  }
  return specs;
}

}  // namespace detail

/// Runs every cell of the requested sweep. Cells are independent jobs over
/// the immutable dataset; `threads` caps the worker count. Results are
/// merged in cell order regardless of completion order.
inline SweepTable run_sweep(SweepKind kind, const BimodalDataset& ds, const ArchConfig& base,
                            std::uint64_t seed, std::size_t threads = 1) {
  SweepTable table;
  table.kind = kind;
  table.base = base;
  table.base.dim_x = ds.dim_x();
  table.base.dim_y = ds.dim_y();
  table.seed = seed;
  auto specs = detail::sweep_cells(table, base);
  table.cells.assign(table.row_labels.size(), std::vector<CvReport>(table.archs.size()));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) return;
      try {
        const auto& spec = specs[i];
        table.cells[spec.row][spec.col] = run_cv(spec.cfg, ds, seed, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(threads, specs.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return table;
}

}  // namespace flawnet
