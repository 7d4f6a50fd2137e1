#include "flawnet/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "flawnet/synthetic.hpp"

using namespace flawnet;

namespace {

BimodalDataset small_synth(std::size_t n = 120, std::uint64_t seed = 3) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.latent_dim = 3;
  cfg.dim_x = 8;
  cfg.dim_y = 6;
  cfg.noise_x = 0.3;
  cfg.noise_y = 0.6;
  cfg.seed = seed;
  return gen_synthetic(cfg);
}

ArchConfig tiny_cfg(ArchKind kind = ArchKind::CorrNet) {
  ArchConfig cfg;
  cfg.kind = kind;
  cfg.layer_width = 6;
  cfg.layer_depth = 1;
  cfg.lambda = 0.1;
  cfg.epochs = 3;
  cfg.batch_size = 32;
  return cfg;
}

}  // namespace

TEST(RunCv, FiveFoldsWithExactMean) {
  const BimodalDataset ds = small_synth();
  const CvReport cv = run_cv(tiny_cfg(), ds, 7);
  ASSERT_EQ(cv.folds.size(), 5u);
  double mean = 0.0;
  for (const auto& f : cv.folds) mean += f.test_balanced_accuracy;
  mean /= 5.0;
  EXPECT_DOUBLE_EQ(cv.mean_test_balanced_accuracy, mean);
  double q = 0.0;
  for (const auto& f : cv.folds) {
    const double d = f.test_balanced_accuracy - mean;
    q += d * d;
  }
  EXPECT_DOUBLE_EQ(cv.std_test_balanced_accuracy, std::sqrt(q / 4.0));
}

TEST(RunCv, FoldSeedsFollowBasePlusIndex) {
  const BimodalDataset ds = small_synth();
  const CvReport cv = run_cv(tiny_cfg(), ds, 20, /*cell_index=*/3);
  for (std::size_t f = 0; f < cv.folds.size(); ++f)
    EXPECT_EQ(cv.folds[f].seed, 20u + f + 3u);
}

TEST(RunCv, DeterministicAcrossRuns) {
  const BimodalDataset ds = small_synth();
  const CvReport a = run_cv(tiny_cfg(), ds, 9);
  const CvReport b = run_cv(tiny_cfg(), ds, 9);
  EXPECT_EQ(a.mean_test_balanced_accuracy, b.mean_test_balanced_accuracy);
  for (std::size_t f = 0; f < 5; ++f)
    EXPECT_EQ(a.folds[f].rep_val_loss, b.folds[f].rep_val_loss);
}

TEST(Sweep, LambdaSweepRequiresCorrnet) {
  const BimodalDataset ds = small_synth();
  try {
    run_sweep(SweepKind::Lambda, ds, tiny_cfg(ArchKind::Jae), 1);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda sweep requires corrnet"), std::string::npos);
  }
}

TEST(Sweep, LambdaGridIncludesAuto) {
  const BimodalDataset ds = small_synth(60);
  ArchConfig cfg = tiny_cfg();
  cfg.epochs = 2;
  cfg.layer_width = 4;
  const SweepTable t = run_sweep(SweepKind::Lambda, ds, cfg, 2);
  ASSERT_EQ(t.row_labels.size(), 6u);
  EXPECT_EQ(t.row_labels.back(), "auto");
  EXPECT_EQ(t.archs, (std::vector<ArchKind>{ArchKind::CorrNet}));
  EXPECT_TRUE(t.cells[5][0].folds[0].lambda_resolved > 0.0);
  EXPECT_DOUBLE_EQ(t.cells[0][0].config.lambda, 0.0);
  EXPECT_DOUBLE_EQ(t.cells[4][0].config.lambda, 10.0);
}

TEST(Sweep, SingleMultiTogglesAugmentation) {
  const BimodalDataset ds = small_synth(60);
  ArchConfig cfg = tiny_cfg();
  cfg.epochs = 2;
  cfg.layer_width = 4;
  const SweepTable t = run_sweep(SweepKind::SingleMulti, ds, cfg, 2);
  ASSERT_EQ(t.row_labels.size(), 2u);
  EXPECT_EQ(t.row_labels[0], "Single+Multimodal");
  EXPECT_TRUE(t.cells[0][0].config.augment_train);
  EXPECT_FALSE(t.cells[1][0].config.augment_train);
  ASSERT_EQ(t.archs.size(), 3u);
}

TEST(Sweep, ParallelExecutionMatchesSerial) {
  const BimodalDataset ds = small_synth(60);
  ArchConfig cfg = tiny_cfg();
  cfg.epochs = 2;
  cfg.layer_width = 4;
  const SweepTable serial = run_sweep(SweepKind::SingleMulti, ds, cfg, 2, 1);
  const SweepTable parallel = run_sweep(SweepKind::SingleMulti, ds, cfg, 2, 4);
  for (std::size_t r = 0; r < serial.row_labels.size(); ++r)
    for (std::size_t c = 0; c < serial.archs.size(); ++c)
      EXPECT_EQ(serial.cells[r][c].mean_test_balanced_accuracy,
                parallel.cells[r][c].mean_test_balanced_accuracy);
}

TEST(Sweep, SizeGridSetsLambdaToZero) {
  // Only check the generated specs (running the 500-wide cells here would be
  // slow); the cell configs are observable through the table after a run on
  // a tiny grid, so instead verify via the Lambda row labels of Size.
  const BimodalDataset ds = small_synth(60);
  ArchConfig cfg = tiny_cfg();
  cfg.epochs = 1;
  cfg.layer_width = 4;
  SweepTable t;
  t.kind = SweepKind::Size;
  const auto specs = detail::sweep_cells(t, cfg);
  ASSERT_EQ(specs.size(), 15u);
  for (const auto& s : specs) {
    EXPECT_DOUBLE_EQ(s.cfg.lambda, 0.0);
    EXPECT_FALSE(s.cfg.lambda_auto);
  }
  EXPECT_EQ(t.row_labels, (std::vector<std::string>{"50x1", "100x1", "500x1", "100x2", "50x4"}));
}
