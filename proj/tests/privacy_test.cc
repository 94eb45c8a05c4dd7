// Copyright 2026 The ldpgof Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpgof/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "ldpgof/distributions.hpp"
#include "ldpgof/random.hpp"
#include "test_util.hpp"

namespace ldpgof {
namespace {

using testing::NoiselessSource;

std::vector<double> random_p_hat(const ProbVector& p0, double spread, Rng& rng) {
  std::vector<double> p_hat(p0.mass().begin(), p0.mass().end());
  for (double& v : p_hat) v += spread * (2.0 * rng.uniform() - 1.0);
  return p_hat;
}

ProbVector random_prob(int d, Rng& rng) {
  std::vector<double> w(static_cast<std::size_t>(d));
  for (double& v : w) v = 0.05 + rng.uniform();
  return normalize(w);
}

TEST(LaplaceDrawTest, MedianNearZero) {
  Rng rng(1);
  std::vector<double> x(1000000);
  for (double& v : x) v = laplace_draw(rng, 1.0);
  std::nth_element(x.begin(), x.begin() + 500000, x.end());
  EXPECT_GT(x[500000], -0.01);
  EXPECT_LT(x[500000], 0.01);
}

TEST(LaplaceDrawTest, VarianceIsTwiceScaleSquared) {
  for (double s : {0.5, 2.0, 4.0}) {
    Rng rng(2);
    double sum = 0.0, sum_sq = 0.0;
    const int m = 1000000;
    for (int i = 0; i < m; ++i) {
      const double v = laplace_draw(rng, s);
      sum += v;
      sum_sq += v * v;
    }
    const double var = sum_sq / m - (sum / m) * (sum / m);
    EXPECT_NEAR(var / (2.0 * s * s), 1.0, 0.03) << "scale " << s;
  }
}

TEST(LaplaceDrawTest, RejectsNonPositiveScale) {
  Rng rng(3);
  EXPECT_THROW(laplace_draw(rng, 0.0), InvalidInput);
  EXPECT_THROW(laplace_draw(rng, -1.0), InvalidInput);
}

TEST(LaplaceDrawTest, RawBitsMapSymmetricallyAndFinitely) {
  EXPECT_TRUE(std::isfinite(bits_to_laplace(0)));
  EXPECT_TRUE(std::isfinite(bits_to_laplace(~0ULL)));
  EXPECT_DOUBLE_EQ(bits_to_laplace(0), -bits_to_laplace(~0ULL));
}

TEST(IndicatorVectorTest, NoiselessReleaseIsUnitVectorOnB) {
  NoiselessSource src;
  const SupportSet b({2, 4, 5}, 6);
  const PrivacyParams params{0.5, 0.1, 10};
  const PrivateVectorRecord r = privatize_indicator_vector(4, b, params, src);
  EXPECT_EQ(r.z, (std::vector<double>{0.0, 1.0, 0.0}));
  const PrivateVectorRecord outside = privatize_indicator_vector(1, b, params, src);
  EXPECT_EQ(outside.z, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_THROW(privatize_indicator_vector(7, b, params, src), InvalidInput);
}

TEST(IndicatorVectorTest, NoiseIsScaledByTwoOverAlpha) {
  testing::ScriptedLaplace src({1.0, -0.5});
  const PrivateVectorRecord r =
      privatize_indicator_vector(1, SupportSet({1, 2}, 2), {0.5, 0.1, 10}, src);
  EXPECT_DOUBLE_EQ(r.z[0], 1.0 + 4.0);
  EXPECT_DOUBLE_EQ(r.z[1], -2.0);
}

TEST(IndicatorVectorTest, CoordinateMeansMatchProbabilities) {
  const ProbVector p = ProbVector::from_probabilities({0.5, 0.3, 0.2});
  const SupportSet b = SupportSet::full(3);
  const double alpha = 0.7;
  const PrivacyParams params{alpha, 0.1, 10};
  const CategoricalSampler sampler(p);
  Rng rng(4);
  const int m = 100000;
  std::vector<double> sums(3, 0.0);
  for (int i = 0; i < m; ++i) {
    const PrivateVectorRecord r = privatize_indicator_vector(sampler(rng), b, params, rng);
    for (int k = 0; k < 3; ++k) sums[static_cast<std::size_t>(k)] += r.z[static_cast<std::size_t>(k)];
  }
  for (int j = 1; j <= 3; ++j) {
    const double sd = std::sqrt((p(j) * (1.0 - p(j)) + 8.0 / (alpha * alpha)) / m);
    EXPECT_NEAR(sums[static_cast<std::size_t>(j - 1)] / m, p(j), 4.0 * sd);
  }
}

TEST(IndicatorVectorTest, WorstCaseLogRatioIsAlpha) {
  for (double alpha : {0.1, 0.5, 1.0}) {
    EXPECT_NEAR(laplace_vector_max_log_ratio(SupportSet({1, 3}, 4), alpha), alpha, 1e-12);
    EXPECT_NEAR(laplace_vector_max_log_ratio(SupportSet::full(5), alpha), alpha, 1e-12);
    // With one coordinate only one indicator can change.
    EXPECT_NEAR(laplace_vector_max_log_ratio(SupportSet({2}, 3), alpha), alpha / 2.0, 1e-12);
  }
}

TEST(IndicatorVectorTest, LogDensityDifferenceBeyondBothIndicators) {
  // At outputs beyond both indicators each differing coordinate contributes
  // exactly alpha/2.
  const SupportSet b({1, 2, 3}, 3);
  const double alpha = 0.8;
  const std::vector<double> z = {2.5, -1.5, 0.3};
  const double diff = laplace_vector_log_density(z, 1, b, alpha) -
                      laplace_vector_log_density(z, 2, b, alpha);
  EXPECT_NEAR(diff, alpha, 1e-12);
}

TEST(TailIndicatorTest, Noiseless) {
  NoiselessSource src;
  const SupportSet b({1, 2}, 4);
  const PrivacyParams params{1.0, 0.1, 10};
  EXPECT_EQ(privatize_tail_indicator(2, b, params, src), 0.0);
  EXPECT_EQ(privatize_tail_indicator(3, b, params, src), 1.0);
}

TEST(TailIndicatorTest, MeanIsTailMass) {
  const ProbVector p = ProbVector::from_probabilities({0.4, 0.3, 0.2, 0.1});
  const SupportSet b({1, 2}, 4);
  const double alpha = 0.5;
  const PrivacyParams params{alpha, 0.1, 10};
  const CategoricalSampler sampler(p);
  Rng rng(5);
  const int m = 100000;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += privatize_tail_indicator(sampler(rng), b, params, rng);
  EXPECT_NEAR(sum / m, 0.3, 4.0 * std::sqrt((0.25 + 8.0 / (alpha * alpha)) / m));
}

TEST(CensorTest, Examples) {
  EXPECT_EQ(censor(0.5, 1.0), 0.5);
  EXPECT_EQ(censor(2.0, 1.0), 1.0);
  EXPECT_EQ(censor(-3.0, 0.1), -0.1);
}

TEST(CensorTest, LipschitzAndIdempotent) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double tau = 0.01 + rng.uniform();
    const double u = 4.0 * rng.uniform() - 2.0;
    const double v = 4.0 * rng.uniform() - 2.0;
    EXPECT_LE(std::fabs(censor(u, tau) - censor(v, tau)), std::fabs(u - v));
    EXPECT_EQ(censor(censor(u, tau), tau), censor(u, tau));
  }
}

TEST(ConstantsTest, CAlphaAndTau) {
  EXPECT_NEAR(c_alpha(1.0), 2.163953413738653, 1e-12);
  EXPECT_DOUBLE_EQ(tau_of(100, 1.0), 0.1);
  EXPECT_DOUBLE_EQ(tau_of(400, 0.5), 0.1);
}

TEST(Stage2Test, ZeroSignalIsFairCoin) {
  const ProbVector p0 = make_family({FamilyKind::kPolynomial, 6, 1.0});
  const std::vector<double> p_hat(p0.mass().begin(), p0.mass().end());
  const Stage2Mechanism mech(p_hat, p0, {0.5, 0.1, 50});
  for (int x = 1; x <= 6; ++x) EXPECT_EQ(mech.plus_probability(x), 0.5);
}

TEST(Stage2Test, OutputIsPlusOrMinusLevel) {
  const ProbVector p0 = make_family({FamilyKind::kUniform, 3});
  const std::vector<double> p_hat = {0.5, 0.3, 0.2};
  const PrivacyParams params{1.0, 0.1, 100};
  Rng rng(7);
  const double level = c_alpha(1.0) * tau_of(100, 1.0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(std::fabs(privatize_stage2(1 + i % 3, p_hat, p0, params, rng).z), level);
  }
  EXPECT_THROW(privatize_stage2(4, p_hat, p0, params, rng), InvalidInput);
}

TEST(Stage2Test, ConditionalMeanIsCensoredDeviation) {
  Rng rng(8);
  for (int c = 0; c < 20; ++c) {
    const int d = 2 + static_cast<int>(rng.uniform() * 10);
    const ProbVector p0 = random_prob(d, rng);
    const PrivacyParams params{0.3 + 0.7 * rng.uniform(), 0.1, 20 + c * 10};
    const std::vector<double> p_hat = random_p_hat(p0, 0.5, rng);
    const Stage2Mechanism mech(p_hat, p0, params);
    for (int j = 1; j <= d; ++j) {
      const double q = mech.plus_probability(j);
      const double mean = mech.level() * q - mech.level() * (1.0 - q);
      EXPECT_NEAR(mean, censor(p_hat[static_cast<std::size_t>(j - 1)] - p0(j), mech.tau()), 1e-15);
    }
  }
}

TEST(Stage2Test, EmpiricalMeanMatchesCensoredDeviation) {
  Rng rng(9);
  const ProbVector p0 = random_prob(5, rng);
  const PrivacyParams params{0.5, 0.1, 200};
  const std::vector<double> p_hat = random_p_hat(p0, 0.2, rng);
  const Stage2Mechanism mech(p_hat, p0, params);
  const int m = 200000;
  for (int j = 1; j <= 5; ++j) {
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += mech(j, rng).z;
    EXPECT_NEAR(sum / m, mech.censored()[static_cast<std::size_t>(j - 1)],
                4.0 * mech.level() / std::sqrt(static_cast<double>(m)));
  }
}

TEST(Stage2Test, EnumeratedRatioMatchesClosedForm) {
  Rng rng(10);
  for (int c = 0; c < 50; ++c) {
    const int d = 2 + static_cast<int>(rng.uniform() * 20);
    const ProbVector p0 = random_prob(d, rng);
    const double alpha = std::vector<double>{0.1, 0.5, 1.0}[static_cast<std::size_t>(c % 3)];
    const PrivacyParams params{alpha, 0.1, 10 + c};
    const Stage2Mechanism mech(random_p_hat(p0, 1.0, rng), p0, params);
    double closed = 0.0;
    const auto a = mech.censored();
    for (double aj : a) {
      for (double ak : a) {
        closed = std::max(closed, std::log((mech.level() + aj) / (mech.level() + ak)));
        closed = std::max(closed, std::log((mech.level() - aj) / (mech.level() - ak)));
      }
    }
    const LdpCheck check = verify_ldp_finite(mech.table(), alpha);
    EXPECT_TRUE(check.ok) << "case " << c;
    EXPECT_NEAR(check.max_log_ratio, closed, 1e-12);
    EXPECT_LE(check.max_log_ratio, alpha + 1e-12);
  }
}

TEST(VerifyLdpTest, RandomStage2TablesPass) {
  Rng rng(12);
  for (int c = 0; c < 100; ++c) {
    const ProbVector p0 = random_prob(5, rng);
    const double alpha = 0.05 + 0.95 * rng.uniform();
    const Stage2Mechanism mech(random_p_hat(p0, 2.0 * rng.uniform(), rng), p0,
                               {alpha, 0.1, 1 + static_cast<int>(rng.uniform() * 1000)});
    EXPECT_TRUE(verify_ldp_finite(mech.table(), alpha).ok);
  }
}

TEST(VerifyLdpTest, IdentityMechanismFails) {
  const LdpCheck check = verify_ldp_finite({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1.0);
  EXPECT_FALSE(check.ok);
  EXPECT_EQ(check.max_log_ratio, std::numeric_limits<double>::infinity());
}

TEST(VerifyLdpTest, UniformOutputPasses) {
  const LdpCheck check = verify_ldp_finite({{0.25, 0.75}, {0.25, 0.75}}, 0.1);
  EXPECT_TRUE(check.ok);
  EXPECT_EQ(check.max_log_ratio, 0.0);
}

TEST(VerifyLdpTest, RandomizedResponseSitsOnTheBoundary) {
  const double alpha = 0.7;
  const double keep = std::exp(alpha) / (1.0 + std::exp(alpha));
  const LdpCheck check = verify_ldp_finite({{keep, 1 - keep}, {1 - keep, keep}}, alpha);
  EXPECT_TRUE(check.ok);
  EXPECT_NEAR(check.max_log_ratio, alpha, 1e-12);
}

TEST(VerifyLdpTest, RejectsRowsNotSummingToOne) {
  EXPECT_THROW(verify_ldp_finite({{0.5, 0.4}, {0.5, 0.5}}, 1.0), InvalidInput);
}

TEST(PrivacyParamsTest, Ranges) {
  EXPECT_THROW((PrivacyParams{1.5, 0.1, 10}.validate()), InvalidInput);
  EXPECT_THROW((PrivacyParams{0.0, 0.1, 10}.validate()), InvalidInput);
  EXPECT_THROW((PrivacyParams{0.5, 1.0, 10}.validate()), InvalidInput);
  EXPECT_THROW((PrivacyParams{0.5, 0.1, 0}.validate()), InvalidInput);
  EXPECT_NO_THROW((PrivacyParams{1.0, 0.5, 1}.validate()));
}

}  // namespace
}  // namespace ldpgof
