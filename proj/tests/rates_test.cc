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

#include "ldpgof/rates.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ldpgof/distributions.hpp"
#include "ldpgof/random.hpp"

namespace ldpgof {
namespace {

const std::vector<FamilySpec>& family_grid() {
  static const std::vector<FamilySpec> kGrid = [] {
    std::vector<FamilySpec> g;
    for (int d : {1, 5, 40, 1000}) {
      g.push_back({FamilyKind::kUniform, d});
      g.push_back({FamilyKind::kNearlyUniform, d, 0.5});
      g.push_back({FamilyKind::kPolynomial, d, 1.0});
      g.push_back({FamilyKind::kPolynomial, d, 0.3});
      g.push_back({FamilyKind::kExponential, d, 1.0, 0.0, 1.0});
      g.push_back({FamilyKind::kExponential, d, 0.5, -1.0, 0.2});
    }
    return g;
  }();
  return kGrid;
}

TEST(UpperBoundTest, UniformFullSupportNonInteractiveL1) {
  const int d = 20, n = 5000;
  const PrivacyParams params{0.5, 0.1, n};
  const ProbVector p0 = make_family({FamilyKind::kUniform, d});
  const RateBound r = upper_bound(p0, n, params, Norm::kL1, Mode::kNonInteractive,
                                  SupportSet::full(d));
  const double expect =
      96.0 * std::pow(d * d * d / (n * (n - 1.0) * std::pow(0.5, 4) * 0.01), 0.25);
  EXPECT_NEAR(r.value, expect, 1e-12 * expect);
  EXPECT_EQ(r.kind, BoundKind::kUpper);
  EXPECT_FALSE(r.j_achieving.has_value());
}

TEST(UpperBoundTest, FullSupportLeavesOnlyMainTerm) {
  const ProbVector p0 = make_family({FamilyKind::kPolynomial, 30, 1.0});
  const PrivacyParams params{1.0, 0.05, 100};
  const RateBound r =
      upper_bound(p0, 100, params, Norm::kL2, Mode::kNonInteractive, SupportSet::full(30));
  EXPECT_NEAR(r.value, 96.0 * std::pow(30.0 / (100.0 * 99.0 * 0.0025), 0.25), 1e-12);
}

TEST(UpperBoundTest, InteractiveL2IgnoresNull) {
  const PrivacyParams params{0.5, 0.05, 1000};
  const double a = upper_bound(make_family({FamilyKind::kUniform, 10}), 1000, params, Norm::kL2,
                               Mode::kInteractive)
                       .value;
  const double b = upper_bound(make_family({FamilyKind::kPolynomial, 500, 2.0}), 1000, params,
                               Norm::kL2, Mode::kInteractive)
                       .value;
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a, 1.0 / std::sqrt(1000 * 0.25 * 0.0025), 1e-12);
}

TEST(UpperBoundTest, PrefixMinimumMatchesBruteForce) {
  Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + static_cast<int>(rng.uniform() * 60);
    std::vector<double> w(static_cast<std::size_t>(d));
    for (double& v : w) v = std::pow(rng.uniform(), 4.0) + 1e-4;
    const ProbVector p0 = normalize(w);
    const int n = 2 + static_cast<int>(std::pow(10.0, 6.0 * rng.uniform()));
    const PrivacyParams params{0.2 + 0.8 * rng.uniform(), 0.02 + 0.5 * rng.uniform(), n};
    const std::vector<int> order = descending_order(p0);
    for (Mode mode : {Mode::kNonInteractive, Mode::kInteractive}) {
      for (Norm norm : {Norm::kL1, Norm::kL2}) {
        if (mode == Mode::kInteractive && norm == Norm::kL2) continue;
        double best = INFINITY;
        int best_j = 0;
        for (int j = 1; j <= d; ++j) {
          const SupportSet b(std::vector<int>(order.begin(), order.begin() + j), d);
          const double v = upper_bound(p0, n, params, norm, mode, b).value;
          if (v < best) {
            best = v;
            best_j = j;
          }
        }
        const RateBound r = upper_bound(p0, n, params, norm, mode);
        EXPECT_NEAR(r.value, best, 1e-12 * best);
        EXPECT_EQ(*r.j_achieving, best_j);
      }
    }
  }
}

TEST(UpperBoundTest, CalibratedInteractiveConstant) {
  const double c = 0.2, gamma = 0.05, e = std::exp(1.0);
  const double expect = std::max(std::sqrt(4.0 / gamma) * 2.0 * (e + 1.0) / ((e - 1.0) * c),
                                 2560.0 / (std::sqrt(e) * c * c * gamma));
  const PrivacyParams params{1.0, gamma, 1000};
  const ProbVector p0 = make_family({FamilyKind::kUniform, 10});
  const RateBound normalized = upper_bound(p0, 1000, params, Norm::kL2, Mode::kInteractive);
  const RateBound calibrated =
      upper_bound(p0, 1000, params, Norm::kL2, Mode::kInteractive, std::nullopt, c);
  EXPECT_NEAR(calibrated.value / normalized.value, expect, 1e-9 * expect);
  EXPECT_NE(calibrated.source.find("calibrated"), std::string::npos);
  EXPECT_NE(normalized.source.find("normalized"), std::string::npos);
  EXPECT_THROW(interactive_upper_constant(1.5, gamma), InvalidInput);
}

TEST(UpperBoundTest, InteractiveNeverWorseThanNonInteractiveForSameSet) {
  for (const FamilySpec& f : family_grid()) {
    const ProbVector p0 = make_family(f);
    for (int n : {10, 1000, 100000}) {
      for (double alpha : {0.1, 1.0}) {
        const PrivacyParams params{alpha, 0.05, n};
        const SupportSet b = SupportSet::full(f.d);
        EXPECT_LE(upper_bound(p0, n, params, Norm::kL1, Mode::kInteractive, b).value,
                  upper_bound(p0, n, params, Norm::kL1, Mode::kNonInteractive, b).value);
      }
    }
  }
}

TEST(LowerBoundTest, UniformSixteenBruteForce) {
  const ProbVector p0 = make_family({FamilyKind::kUniform, 16});
  const int n = 1000000;
  double best = 0.0;
  int best_j = 0;
  for (int j = 1; j <= 16; ++j) {
    const double v = std::min(std::pow(j, 0.75) / 1000.0, j / (16.0 * std::sqrt(std::log(2.0 * j))));
    if (v > best) {
      best = v;
      best_j = j;
    }
  }
  const RateBound r = lower_bound(p0, n, 1.0, Norm::kL1, Mode::kNonInteractive);
  EXPECT_DOUBLE_EQ(r.value, best);
  EXPECT_EQ(*r.j_achieving, best_j);
  EXPECT_EQ(r.kind, BoundKind::kLower);
}

TEST(LowerBoundTest, InteractiveL2IsInverseRoot) {
  const RateBound r =
      lower_bound(make_family({FamilyKind::kPolynomial, 7, 1.0}), 400, 0.5, Norm::kL2,
                  Mode::kInteractive);
  EXPECT_DOUBLE_EQ(r.value, 0.1);
  EXPECT_FALSE(r.j_achieving.has_value());
}

TEST(LowerBoundTest, SingleCategory) {
  const ProbVector p0 = make_family({FamilyKind::kUniform, 1});
  const RateBound r = lower_bound(p0, 100, 1.0, Norm::kL1, Mode::kNonInteractive);
  EXPECT_DOUBLE_EQ(r.value, std::min(0.1, 1.0 / std::sqrt(std::log(2.0))));
  EXPECT_EQ(*r.j_achieving, 1);
}

TEST(LowerBoundTest, NeverExceedsUpperBound) {
  // Unit-constant sanity ratio: K = 1 for every (mode, norm).
  for (const FamilySpec& f : family_grid()) {
    const ProbVector p0 = make_family(f);
    for (int n : {10, 1000, 100000, 10000000}) {
      for (double alpha : {0.1, 0.5, 1.0}) {
        const PrivacyParams params{alpha, 0.05, n};
        for (Mode mode : {Mode::kNonInteractive, Mode::kInteractive}) {
          for (Norm norm : {Norm::kL1, Norm::kL2}) {
            EXPECT_LE(lower_bound(p0, n, alpha, norm, mode).value,
                      upper_bound(p0, n, params, norm, mode).value)
                << to_string(f.kind) << " d=" << f.d << " n=" << n;
          }
        }
      }
    }
  }
}

TEST(CorollaryIndicesTest, NearlyUniformReachesD) {
  const double beta = 0.5;
  const int d = 50;
  // Choose n alpha^2 so that d^{3/4}/sqrt(N) <= (1 - beta)/sqrt(log 2d).
  const double big_n = std::pow(std::pow(d, 0.75) * std::sqrt(std::log(2.0 * d)) / (1 - beta), 2);
  const int n = static_cast<int>(std::ceil(big_n)) + 1;
  const CorollaryIndices idx =
      corollary_indices(make_family({FamilyKind::kNearlyUniform, d, beta}), n, 1.0);
  ASSERT_TRUE(idx.l_star.has_value());
  EXPECT_EQ(*idx.l_star, d);
}

TEST(CorollaryIndicesTest, PointMass) {
  const ProbVector p0 = ProbVector::from_probabilities({1.0, 0.0, 0.0});
  const CorollaryIndices idx = corollary_indices(p0, 10000, 1.0);
  EXPECT_EQ(idx.l_star, 1);
  EXPECT_EQ(idx.l_starstar, 1);
  EXPECT_EQ(idx.l_tilde, 1);
  const CorollaryIndices none = corollary_indices(p0, 1, 0.1);
  EXPECT_FALSE(none.l_star.has_value());
}

TEST(CorollaryIndicesTest, GeometricMatchesClosedForm) {
  // p0(j) = C exp(-j): the defining inequality reads
  // j <= log(C sqrt(N)) + log(j)/4 - log log(2j) / 2, so the index is about
  // log(C^2 N) / 2.
  const ProbVector p0 = make_family({FamilyKind::kExponential, 400, 1.0, 0.0, 1.0});
  const double c0 = p0(1) * std::exp(1.0);
  for (double big_n : {1e4, 1e6, 1e8, 1e9}) {
    const CorollaryIndices idx = corollary_indices(p0, static_cast<int>(big_n), 1.0);
    const double closed = std::floor(std::log(c0 * c0 * big_n) / 2.0);
    ASSERT_TRUE(idx.l_star.has_value());
    EXPECT_LE(std::abs(*idx.l_star - closed), 2.0) << "N=" << big_n;
  }
}

TEST(CorollaryIndicesTest, NonDecreasingInEffectiveSampleSize) {
  for (const FamilySpec& f : family_grid()) {
    const ProbVector p0 = make_family(f);
    int a = 0, b = 0, c = 0;
    for (int n = 1; n <= 100000000; n *= 4) {
      const CorollaryIndices idx = corollary_indices(p0, n, 1.0);
      EXPECT_GE(idx.l_star.value_or(0), a);
      EXPECT_GE(idx.l_starstar.value_or(0), b);
      EXPECT_GE(idx.l_tilde.value_or(0), c);
      a = idx.l_star.value_or(0);
      b = idx.l_starstar.value_or(0);
      c = idx.l_tilde.value_or(0);
    }
  }
}

TEST(Table1RateTest, ClosedForms) {
  const int n = 10000;
  const double alpha = 0.5;
  const double big_n = n * alpha * alpha;
  const FamilySpec uni{FamilyKind::kUniform, 64};
  EXPECT_DOUBLE_EQ(table1_rate(uni, n, alpha, Norm::kL1, Mode::kNonInteractive),
                   std::pow(64.0, 0.75) / std::sqrt(big_n));
  EXPECT_DOUBLE_EQ(table1_rate(uni, n, alpha, Norm::kL1, Mode::kInteractive),
                   8.0 / std::sqrt(big_n));
  EXPECT_DOUBLE_EQ(table1_rate(uni, n, alpha, Norm::kL2, Mode::kNonInteractive, RateSide::kLower),
                   std::min(std::pow(64.0, 0.25) / std::sqrt(big_n), 1.0 / 8.0));
  const FamilySpec poly{FamilyKind::kPolynomial, 1000, 1.5};
  EXPECT_DOUBLE_EQ(table1_rate(poly, n, alpha, Norm::kL1, Mode::kInteractive),
                   std::min(std::pow(big_n, -3.0 / 8.0), std::sqrt(1000.0) / std::sqrt(big_n)));
  for (const FamilySpec& f : family_grid()) {
    EXPECT_DOUBLE_EQ(table1_rate(f, n, alpha, Norm::kL2, Mode::kInteractive),
                     1.0 / std::sqrt(big_n));
  }
  const FamilySpec ex{FamilyKind::kExponential, 1000, 2.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(table1_rate(ex, n, alpha, Norm::kL1, Mode::kNonInteractive),
                   std::pow(std::log(big_n), 3.0 / 8.0) / std::sqrt(big_n));
  EXPECT_THROW(table1_rate(ex, 1, 0.5, Norm::kL1, Mode::kNonInteractive), InvalidInput);
}

TEST(Table1RateTest, NearlyUniformOnlyInteractiveL2) {
  const FamilySpec f{FamilyKind::kNearlyUniform, 100, 0.5};
  try {
    table1_rate(f, 1000, 1.0, Norm::kL1, Mode::kNonInteractive);
    FAIL() << "expected Unsupported";
  } catch (const Unsupported& e) {
    EXPECT_NE(std::string(e.what()).find("nearly_uniform"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("noninteractive"), std::string::npos);
  }
  EXPECT_NO_THROW(table1_rate(f, 1000, 1.0, Norm::kL2, Mode::kInteractive));
}

TEST(Table1RateTest, UniformMatchesFullSupportUpperBoundUpToConstants) {
  const double gamma = 0.05;
  for (int d : {2, 10, 100, 1000}) {
    for (int n : {1000, 100000}) {
      for (double alpha : {0.25, 1.0}) {
        const FamilySpec f{FamilyKind::kUniform, d};
        const ProbVector p0 = make_family(f);
        const PrivacyParams params{alpha, gamma, n};
        const SupportSet b = SupportSet::full(d);
        const double ni = upper_bound(p0, n, params, Norm::kL1, Mode::kNonInteractive, b).value /
                          table1_rate(f, n, alpha, Norm::kL1, Mode::kNonInteractive);
        EXPECT_NEAR(ni * std::pow((n - 1.0) / n, 0.25), 96.0 / std::sqrt(gamma), 1e-9);
        const double in = upper_bound(p0, n, params, Norm::kL1, Mode::kInteractive, b).value /
                          table1_rate(f, n, alpha, Norm::kL1, Mode::kInteractive);
        EXPECT_NEAR(in, 1.0 / gamma, 1e-9);
      }
    }
  }
}

TEST(RateTableTest, RowsAndSplitCells) {
  RateGrid g;
  g.families = {{FamilyKind::kUniform, 10}, {FamilyKind::kNearlyUniform, 10, 0.5}};
  g.n_values = {1000};
  g.alphas = {1.0};
  const std::vector<RateRow> rows = rate_table(g);
  int split = 0, nearly_table = 0;
  for (const RateRow& r : rows) {
    if (r.kind == "table1_upper" || r.kind == "table1_lower") ++split;
    if (r.family.kind == FamilyKind::kNearlyUniform && r.kind.rfind("table1", 0) == 0) ++nearly_table;
    EXPECT_GT(r.value, 0.0);
  }
  EXPECT_EQ(split, 2);
  EXPECT_EQ(nearly_table, 1);
  // 2 families x 4 cells x (upper, lower) + uniform table cells (3 + 2) + 1.
  EXPECT_EQ(rows.size(), 16u + 5u + 1u);
  EXPECT_THROW(rate_table(RateGrid{}), InvalidInput);
}

}  // namespace
}  // namespace ldpgof
