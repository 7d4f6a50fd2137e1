#include "flawnet/model.hpp"

#include <gtest/gtest.h>

#include "testutil.hpp"

using namespace flawnet;

namespace {

ArchConfig small_cfg(ArchKind kind, std::size_t dx = 722, std::size_t dy = 77,
                     std::size_t w = 50, std::size_t d = 1) {
  ArchConfig cfg;
  cfg.kind = kind;
  cfg.dim_x = dx;
  cfg.dim_y = dy;
  cfg.layer_width = w;
  cfg.layer_depth = d;
  return cfg;
}

}  // namespace

TEST(ParamCount, SingleLayerArithmetic) {
  Mlp m({10, 50});
  EXPECT_EQ(param_count(m), 550u);
}

TEST(ParamCount, EmptyModelIsZero) {
  Mlp m;
  EXPECT_EQ(param_count(m), 0u);
}

TEST(ParamCount, AdditiveOverLayers) {
  Mlp m({7, 5, 3, 2});
  EXPECT_EQ(param_count(m), (7u * 5 + 5) + (5u * 3 + 3) + (3u * 2 + 2));
}

TEST(BuildModel, CorrnetRepresentationParameterCount) {
  MultimodalModel m = build_model(small_cfg(ArchKind::CorrNet));
  // encoders 36150 + 3900, mixing 2550, decoders 36822 + 3927
  EXPECT_EQ(model_param_count(m, /*include_head=*/false), 83349u);
}

TEST(BuildModel, JaeHalvesInternalWidths) {
  MultimodalModel m = build_model(small_cfg(ArchKind::Jae));
  EXPECT_EQ(m.enc_x.out_dim(), 25u);
  EXPECT_EQ(m.mixing.in_dim(), 25u);
  EXPECT_EQ(m.penc_y.out_dim(), 25u);
  EXPECT_EQ(m.dec_x.in_dim(), 50u);  // concat(private, shared)
  EXPECT_EQ(m.dec_x.out_dim(), 722u);
  EXPECT_EQ(m.representation_width(), 25u);
}

TEST(BuildModel, JaeWidthOneIsRejected) {
  EXPECT_THROW(build_model(small_cfg(ArchKind::Jae, 10, 10, 1)), ConfigError);
}

TEST(BuildModel, BidnnCentralWeightsShareStorage) {
  MultimodalModel m = build_model(small_cfg(ArchKind::Bidnn, 8, 6, 4));
  ASSERT_EQ(m.mix_yx.layer_count(), 1u);
  EXPECT_TRUE(m.mix_yx.layer(0).shares_weight_with(m.mixing.layer(0)));
  m.mixing.layer(0).stored_weight()(1, 2) = 7.5;
  EXPECT_DOUBLE_EQ(m.mix_yx.layer(0).effective_weight()(2, 1), 7.5);
}

TEST(BuildModel, BidnnDepthTwoTiesReversedLayerOrder) {
  MultimodalModel m = build_model(small_cfg(ArchKind::Bidnn, 8, 6, 4, 2));
  EXPECT_TRUE(m.mix_yx.layer(0).shares_weight_with(m.mixing.layer(1)));
  EXPECT_TRUE(m.mix_yx.layer(1).shares_weight_with(m.mixing.layer(0)));
}

TEST(BuildModel, BidnnTiedWeightCountedOnce) {
  MultimodalModel m = build_model(small_cfg(ArchKind::Bidnn, 722, 77, 50, 1));
  // enc_x 36150, enc_y 3900, mixing weight 2500 + two biases 100,
  // dec_x 36822, dec_y 3927
  EXPECT_EQ(model_param_count(m, false), 36150u + 3900 + 2500 + 100 + 36822 + 3927);
}

TEST(BuildModel, HeadShape) {
  MultimodalModel c = build_model(small_cfg(ArchKind::CorrNet, 20, 10, 16));
  EXPECT_EQ(c.head.in_dim(), 16u);
  EXPECT_EQ(c.head.out_dim(), 2u);
  EXPECT_EQ(c.head.layer_count(), 2u);
  MultimodalModel b = build_model(small_cfg(ArchKind::Bidnn, 20, 10, 16));
  EXPECT_EQ(b.head.in_dim(), 32u);
}

TEST(BuildModel, RepresentationParametersExcludeHead) {
  MultimodalModel m = build_model(small_cfg(ArchKind::CorrNet, 20, 10, 16));
  const auto rep = m.representation_parameters();
  for (const auto& p : rep) EXPECT_EQ(p.name.find("head"), std::string::npos);
  EXPECT_EQ(param_count(m.parameters()),
            param_count(rep) + param_count(m.head_parameters()));
}

TEST(BaselineMatched, FixedPointReturnsOwnWidth) {
  ArchConfig cfg = small_cfg(ArchKind::Baseline, 30, 20, 8);
  const std::size_t target = baseline_param_count(50, 8, 1);
  MultimodalModel m = build_baseline_matched(cfg, target);
  EXPECT_EQ(m.config.layer_width, 8u);
  EXPECT_EQ(model_param_count(m), target);
}

TEST(BaselineMatched, ParityAgainstCorrnetWithHead) {
  MultimodalModel corr = build_model(small_cfg(ArchKind::CorrNet));
  const std::size_t target = model_param_count(corr);
  MultimodalModel base = build_baseline_matched(small_cfg(ArchKind::CorrNet), target);
  const double got = static_cast<double>(model_param_count(base));
  const double want = static_cast<double>(target);
  EXPECT_LE(std::abs(got - want) / want, 0.02);
}

TEST(BaselineMatched, CountsMonotonicInWidth) {
  for (std::size_t w = 1; w < 40; ++w)
    EXPECT_LT(baseline_param_count(100, w, 2), baseline_param_count(100, w + 1, 2));
}

TEST(BaselineMatched, UnreachableParityReportsClosest) {
  ArchConfig cfg = small_cfg(ArchKind::Baseline, 5, 5, 2);
  try {
    build_baseline_matched(cfg, 100000000);  // far beyond width 10*2
    FAIL() << "expected ParityError";
  } catch (const ParityError& e) {
    EXPECT_NE(std::string(e.what()).find("closest"), std::string::npos);
  }
}

TEST(InitializeModel, LsuvNeedsBothCalibrationBatches) {
  MultimodalModel m = build_model(small_cfg(ArchKind::CorrNet, 6, 4, 4));
  Rng rng(1);
  const Matrix cx = testutil::random_matrix(rng, 16, 6);
  EXPECT_THROW(initialize_model(m, InitScheme::lsuv(), 1, &cx, nullptr), ConfigError);
}

TEST(InitializeModel, InitializesEveryComponent) {
  MultimodalModel m = build_model(small_cfg(ArchKind::Jae, 6, 4, 4));
  initialize_model(m, InitScheme::kaiming(), 5);
  bool any = false;
  for (double v : m.pdec_y.layer(0).stored_weight().data()) any = any || v != 0.0;
  EXPECT_TRUE(any);
  any = false;
  for (double v : m.head.layer(1).stored_weight().data()) any = any || v != 0.0;
  EXPECT_TRUE(any);
}

TEST(ArchConfig, ValidationCatchesBadValues) {
  ArchConfig cfg = small_cfg(ArchKind::CorrNet, 4, 4);
  cfg.lambda = -0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.lambda = 0.0;
  cfg.layer_depth = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
