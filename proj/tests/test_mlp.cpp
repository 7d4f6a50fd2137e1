#include "flawnet/nn.hpp"

#include <gtest/gtest.h>

#include "flawnet/init.hpp"
#include "flawnet/loss.hpp"
#include "testutil.hpp"

using namespace flawnet;

namespace {

Mlp random_mlp(Rng& rng, const std::vector<std::size_t>& dims, bool activate_last = false) {
  Mlp m(dims, activate_last);
  initialize(m, InitScheme::kaiming(), rng);
  return m;
}

}  // namespace

TEST(MlpForward, IdentityLayerAppliesLeakyReluSignCases) {
  Mlp m({2, 2});
  m.layer(0).stored_weight() = Matrix::from_rows({{1, 0}, {0, 1}});
  // One hidden layer only: the final layer is unactivated by default, so add
  // activate_last to exercise the slope.
  Mlp act({2, 2}, /*activate_last=*/true);
  act.layer(0).stored_weight() = Matrix::from_rows({{1, 0}, {0, 1}});
  const Matrix out = act.forward(Matrix::from_rows({{1, -2}}));
  EXPECT_DOUBLE_EQ(out(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(out(0, 1), -0.02);
  // Without activation the layer is the identity map.
  const Matrix lin = m.forward(Matrix::from_rows({{1, -2}}));
  EXPECT_DOUBLE_EQ(lin(0, 1), -2.0);
}

TEST(MlpForward, ZeroParametersGiveZeroOutput) {
  Rng rng(3);
  Mlp m({3, 4, 2});
  const Matrix out = m.forward(testutil::random_matrix(rng, 5, 3));
  for (double v : out.data()) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(MlpForward, MatchesNaiveTwoLayerOracle) {
  Rng rng(17);
  Mlp m = random_mlp(rng, {6, 5, 3});
  const Matrix x = testutil::random_matrix(rng, 4, 6);
  const Matrix got = m.forward(x);
  const Matrix expected = testutil::naive_mlp_forward(m, x);
  ASSERT_EQ(got.rows(), 4u);
  ASSERT_EQ(got.cols(), 3u);
  for (std::size_t i = 0; i < got.size(); ++i)
    EXPECT_NEAR(got.data()[i], expected.data()[i], 1e-12);
}

TEST(MlpForward, DimensionMismatchThrows) {
  Mlp m({3, 2});
  EXPECT_THROW(m.forward(Matrix(2, 4)), ShapeError);
}

TEST(MlpForward, LeakyReluIsMonotone) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = testutil::random_matrix(rng, 3, 4);
    Matrix b = a;
    for (double& v : b.data()) v += rng.uniform();  // b >= a elementwise
    const Matrix fa = leaky_relu(a, kLeakySlope);
    const Matrix fb = leaky_relu(b, kLeakySlope);
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_LE(fa.data()[i], fb.data()[i]);
  }
}

TEST(MlpBackward, BeforeForwardThrowsStateError) {
  Mlp m({2, 2});
  GradStore gs;
  EXPECT_THROW(m.backward(Matrix(1, 2), gs), StateError);
}

TEST(MlpBackward, ZeroUpstreamGivesZeroParameterGradients) {
  Rng rng(31);
  Mlp m = random_mlp(rng, {4, 3, 2});
  const Matrix x = testutil::random_matrix(rng, 5, 4);
  m.forward(x);
  GradStore gs;
  m.backward(Matrix(5, 2), gs);
  std::vector<ParamRef> params;
  m.collect_params("m", params);
  for (const auto& g : gs.aligned(params))
    for (double v : g) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(MlpBackward, SingleLayerMseGradientClosedForm) {
  // For L = mean((x·Wᵀ + b − t)²), dW = 2/(batch·out) · errᵀ·x.
  Rng rng(37);
  Mlp m({3, 2});
  initialize(m, InitScheme::kaiming(), rng);
  const Matrix x = testutil::random_matrix(rng, 4, 3);
  const Matrix t = testutil::random_matrix(rng, 4, 2);
  MlpTrace trace;
  const Matrix pred = m.forward(x, trace);
  const auto mse = mse_loss(pred, t);
  GradStore gs;
  m.backward(trace, mse.grad, gs);

  const Matrix err = pred - t;
  const Matrix expected = matmul_tn(err, x);  // out×in
  const double scale = 2.0 / static_cast<double>(pred.size());
  const auto* got = gs.find(m.layer(0).weight_key());
  ASSERT_NE(got, nullptr);
  for (std::size_t i = 0; i < expected.size(); ++i)
    EXPECT_NEAR((*got)[i], scale * expected.data()[i], 1e-12);
}

TEST(MlpBackward, MatchesFiniteDifferencesIncludingInput) {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    Mlp m = random_mlp(rng, {5, 4, 4, 3}, trial % 2 == 0);
    Matrix x = testutil::random_matrix(rng, 6, 5);
    const Matrix t = testutil::random_matrix(rng, 6, 3);

    MlpTrace trace;
    const Matrix pred = m.forward(x, trace);
    const auto mse = mse_loss(pred, t);
    GradStore gs;
    const Matrix dx = m.backward(trace, mse.grad, gs);

    std::vector<ParamRef> params;
    m.collect_params("m", params);
    auto loss = [&] { return mse_value(m.forward_inference(x), t); };
    EXPECT_LT(testutil::max_grad_relative_error(params, gs.aligned(params), loss), 1e-4);
    EXPECT_LT(testutil::max_input_grad_relative_error(x, dx, loss), 1e-4);
  }
}

TEST(ParamSnapshots, RoundTripRestores) {
  Rng rng(43);
  Mlp m = random_mlp(rng, {3, 3});
  std::vector<ParamRef> params;
  m.collect_params("m", params);
  const auto snap = snapshot_params(params);
  m.layer(0).stored_weight()(0, 0) += 5.0;
  m.layer(0).bias()[1] -= 2.0;
  restore_params(params, snap);
  EXPECT_EQ(snapshot_params(params), snap);
}
