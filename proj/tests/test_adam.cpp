#include "flawnet/adam.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace flawnet;

namespace {

/// Textbook scalar Adam, written independently of the optimizer class.
struct ScalarAdamOracle {
  double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double m = 0.0, v = 0.0;
  int t = 0;

  double step(double param, double grad) {
    ++t;
    m = b1 * m + (1 - b1) * grad;
    v = b2 * v + (1 - b2) * grad * grad;
    const double mhat = m / (1 - std::pow(b1, t));
    const double vhat = v / (1 - std::pow(b2, t));
    return param - lr * mhat / (std::sqrt(vhat) + eps);
  }
};

}  // namespace

TEST(Adam, ZeroGradientIsIdentityForAnyStepCount) {
  double p[2] = {1.25, -3.5};
  Adam adam;
  const std::vector<ParamRef> params{{"p", p, 2, p}};
  const std::vector<std::vector<double>> grads{{0.0, 0.0}};
  for (int i = 0; i < 25; ++i) adam.step(params, grads);
  EXPECT_DOUBLE_EQ(p[0], 1.25);
  EXPECT_DOUBLE_EQ(p[1], -3.5);
}

TEST(Adam, FirstStepApproximatesSignedLearningRate) {
  double p = 1.0;
  Adam adam;
  adam.step({{"p", &p, 1, &p}}, {{0.5}});
  EXPECT_NEAR(p, 0.9990, 1e-6);
}

TEST(Adam, MatchesScalarOracleOverSuccessiveSteps) {
  double p = 0.8;
  double oracle_p = 0.8;
  ScalarAdamOracle oracle;
  Adam adam;
  const double grads[4] = {0.5, -0.25, 0.1, 2.0};
  for (double g : grads) {
    adam.step({{"p", &p, 1, &p}}, {{g}});
    oracle_p = oracle.step(oracle_p, g);
    EXPECT_NEAR(p, oracle_p, 1e-12);
  }
}

TEST(Adam, NonFiniteGradientNamesTheParameter) {
  double p = 1.0;
  Adam adam;
  try {
    adam.step({{"enc_x.0.weight", &p, 1, &p}}, {{std::numeric_limits<double>::quiet_NaN()}});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("enc_x.0.weight"), std::string::npos);
  }
}

TEST(Adam, RejectsBadHyperparameters) {
  EXPECT_THROW(Adam({.lr = -1.0}), ConfigError);
  EXPECT_THROW(Adam({.beta1 = 1.0}), ConfigError);
  EXPECT_THROW(Adam({.beta2 = 0.0}), ConfigError);
}
