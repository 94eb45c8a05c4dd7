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

#ifndef LDPGOF_TESTSTATS_HPP_
#define LDPGOF_TESTSTATS_HPP_

// Goodness-of-fit statistics on privatized data and the two composite tests.
//
// Non-interactive test (2n users): the first n users release Laplace
// indicator vectors over B, giving the U-statistic S_B; the last n release
// the tail indicator, giving T_B. Reject when S_B >= C1 or T_B >= C2.
//
// Interactive test (3n users): users 1..n release indicator vectors over all
// of [d] and their average p_hat is broadcast; users n+1..2n run the censored
// randomized response against p_hat, giving D_n; users 2n+1..3n give T_B.
// Reject when D_n >= C3 or T_B >= C2.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldpgof/distributions.hpp"
#include "ldpgof/error.hpp"
#include "ldpgof/privacy.hpp"
#include "ldpgof/random.hpp"
#include "ldpgof/support_set.hpp"

namespace ldpgof {

enum class Norm { kL1, kL2 };
enum class Mode { kNonInteractive, kInteractive };

inline const char* to_string(Norm norm) { return norm == Norm::kL1 ? "L1" : "L2"; }

inline const char* to_string(Mode mode) {
  return mode == Mode::kNonInteractive ? "noninteractive" : "interactive";
}

inline Norm norm_from_string(const std::string& s) {
  if (s == "L1" || s == "l1") return Norm::kL1;
  if (s == "L2" || s == "l2") return Norm::kL2;
  throw InvalidInput("unknown norm '" + s + "' (expected l1 or l2)");
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "noninteractive" || s == "ni") return Mode::kNonInteractive;
  if (s == "interactive") return Mode::kInteractive;
  throw InvalidInput("unknown mode '" + s + "' (expected ni or interactive)");
}

// Row-major n x |B| view of privatized indicator vectors.
struct MatrixView {
  std::span<const double> data;
  int rows = 0;
  int cols = 0;

  double operator()(int i, int k) const {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(k)];
  }
};

// Streaming form of S_B. Per coordinate it keeps sum(a) and sum(a^2) with
// a = z - p0(j); the off-diagonal sum over i1 != i2 is (sum a)^2 - sum a^2.
class SStatAccumulator {
 public:
  SStatAccumulator(const ProbVector& p0, const SupportSet& b)
      : centre_(static_cast<std::size_t>(b.size())),
        sum_(centre_.size(), 0.0),
        sum_sq_(centre_.size(), 0.0) {
    if (b.d() != p0.d()) throw InvalidInput("SStatAccumulator: d mismatch");
    for (std::size_t k = 0; k < centre_.size(); ++k) centre_[k] = p0(b.members()[k]);
  }

  void add(std::span<const double> z) {
    for (std::size_t k = 0; k < centre_.size(); ++k) {
      const double a = z[k] - centre_[k];
      sum_[k] += a;
      sum_sq_[k] += a * a;
    }
    ++rows_;
  }

  int rows() const noexcept { return rows_; }

  double value() const {
    if (rows_ < 2) throw InvalidInput("statistic_S: needs n >= 2");
    const double n = rows_;
    double s = 0.0;
    for (std::size_t k = 0; k < centre_.size(); ++k) {
      s += sum_[k] * sum_[k] - sum_sq_[k];
    }
    return s / (n * (n - 1.0));
  }

 private:
  std::vector<double> centre_;
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
  int rows_ = 0;
};

inline double statistic_S(MatrixView z, const ProbVector& p0, const SupportSet& b) {
  if (z.cols != b.size()) {
    throw InvalidInput("statistic_S: matrix has " + std::to_string(z.cols) +
                       " columns but |B| = " + std::to_string(b.size()));
  }
  if (z.rows < 2) throw InvalidInput("statistic_S: needs n >= 2");
  SStatAccumulator acc(p0, b);
  for (int i = 0; i < z.rows; ++i) {
    acc.add(z.data.subspan(static_cast<std::size_t>(i) * static_cast<std::size_t>(z.cols),
                           static_cast<std::size_t>(z.cols)));
  }
  return acc.value();
}

inline double statistic_T(std::span<const double> z, double p0_tail) {
  if (z.empty()) throw InvalidInput("statistic_T: empty input");
  double s = 0.0;
  for (double v : z) s += v - p0_tail;
  return s / static_cast<double>(z.size());
}

inline double statistic_D(std::span<const Stage2Record> z2,
                          std::span<const double> p_hat, const ProbVector& p0,
                          double tau) {
  if (z2.empty()) throw InvalidInput("statistic_D: empty input");
  if (static_cast<int>(p_hat.size()) != p0.d()) {
    throw InvalidInput("statistic_D: p_hat length differs from d");
  }
  if (!(tau > 0.0)) throw InvalidInput("statistic_D: tau must be positive");
  double mean = 0.0;
  for (const Stage2Record& r : z2) mean += r.z;
  mean /= static_cast<double>(z2.size());
  double centre = 0.0;
  for (int j = 1; j <= p0.d(); ++j) {
    centre += p0(j) * censor(p_hat[static_cast<std::size_t>(j - 1)] - p0(j), tau);
  }
  return mean - centre;
}

struct CriticalValues {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

// C1 = {656 |B| / (n(n-1) alpha^4 gamma)}^1/2, C2 = 6 / (n alpha^2 gamma)^1/2,
// C3 = (e+1)/(e-1) * (4/gamma)^1/2 / (n alpha^2). C3 uses the literal
// constant e, not c_alpha.
inline CriticalValues critical_values(int n, int b_size, const PrivacyParams& params) {
  params.validate();
  if (n < 2) throw InvalidInput("critical_values: n must be >= 2");
  if (b_size < 1) throw InvalidInput("critical_values: |B| must be >= 1");
  const double nn = n;
  const double a2 = params.alpha * params.alpha;
  const double e = std::exp(1.0);
  CriticalValues cv;
  cv.c1 = std::sqrt(656.0 * b_size / (nn * (nn - 1.0) * a2 * a2 * params.gamma));
  cv.c2 = 6.0 / std::sqrt(nn * a2 * params.gamma);
  cv.c3 = (e + 1.0) / (e - 1.0) * std::sqrt(4.0 / params.gamma) / (nn * a2);
  return cv;
}

struct BSelection {
  int j_star = 1;
  SupportSet b;
};

// Exponent of j in the selection rule: 3/4 (NI, L1), 1/4 (NI, L2),
// 1/2 (interactive, L1). Interactive L2 does not depend on B.
inline double selection_exponent(Norm norm, Mode mode) {
  if (mode == Mode::kNonInteractive) return norm == Norm::kL1 ? 0.75 : 0.25;
  return 0.5;
}

// Smallest j with j^e / (n alpha^2)^1/2 >= mass beyond the top j categories,
// scanning p0 in decreasing order; B is those top j categories.
inline BSelection select_B(const ProbVector& p0, int n, double alpha, Norm norm,
                           Mode mode) {
  if (n < 1) throw InvalidInput("select_B: n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  const int d = p0.d();
  if (mode == Mode::kInteractive && norm == Norm::kL2) {
    return BSelection{d, SupportSet::full(d)};
  }
  const std::vector<int> order = descending_order(p0);
  // tail[j] = sum of sorted masses at positions j+1..d.
  std::vector<double> tail(static_cast<std::size_t>(d) + 1, 0.0);
  for (int j = d - 1; j >= 0; --j) {
    tail[static_cast<std::size_t>(j)] =
        tail[static_cast<std::size_t>(j) + 1] + p0(order[static_cast<std::size_t>(j)]);
  }
  const double root_n = std::sqrt(static_cast<double>(n) * alpha * alpha);
  const double e = selection_exponent(norm, mode);
  int chosen = d;
  for (int j = 1; j <= d; ++j) {
    if (std::pow(static_cast<double>(j), e) / root_n >= tail[static_cast<std::size_t>(j)]) {
      chosen = j;
      break;
    }
  }
  std::vector<int> members(order.begin(), order.begin() + chosen);
  return BSelection{chosen, SupportSet(std::move(members), d)};
}

struct TestReport {
  std::optional<double> s_b;  // non-interactive only
  double t_b = 0.0;
  std::optional<double> d_n;  // interactive only
  double c1 = 0.0;
  double c2 = 0.0;
  std::optional<double> c3;   // interactive only
  bool reject = false;
  SupportSet b_used = SupportSet::full(1);
  Mode mode = Mode::kNonInteractive;
  Norm norm = Norm::kL1;

  bool decision() const {
    if (mode == Mode::kNonInteractive) return *s_b >= c1 || t_b >= c2;
    return *d_n >= *c3 || t_b >= c2;
  }

  void validate() const {
    if (mode == Mode::kNonInteractive ? !s_b.has_value() : (!d_n || !c3)) {
      throw InvalidInput("TestReport: statistics missing for mode");
    }
    if (!(c1 > 0.0 && c2 > 0.0 && (!c3 || *c3 > 0.0))) {
      throw InvalidInput("TestReport: critical values must be positive");
    }
    if (reject != decision()) {
      throw InvalidInput("TestReport: reject flag inconsistent with statistics");
    }
  }
};

inline void to_json(nlohmann::json& j, const TestReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  j = nlohmann::json{{"s_b", opt(r.s_b)},
                     {"t_b", r.t_b},
                     {"d_n", opt(r.d_n)},
                     {"c1", r.c1},
                     {"c2", r.c2},
                     {"c3", opt(r.c3)},
                     {"reject", r.reject},
                     {"b_used", std::vector<int>(r.b_used.members().begin(),
                                                 r.b_used.members().end())},
                     {"d", r.b_used.d()},
                     {"mode", to_string(r.mode)},
                     {"norm", to_string(r.norm)}};
}

inline void from_json(const nlohmann::json& j, TestReport& r) {
  auto opt = [&j](const char* key) -> std::optional<double> {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  r.s_b = opt("s_b");
  r.t_b = j.at("t_b").get<double>();
  r.d_n = opt("d_n");
  r.c1 = j.at("c1").get<double>();
  r.c2 = j.at("c2").get<double>();
  r.c3 = opt("c3");
  r.reject = j.at("reject").get<bool>();
  r.b_used = SupportSet(j.at("b_used").get<std::vector<int>>(), j.at("d").get<int>());
  r.mode = mode_from_string(j.at("mode").get<std::string>());
  r.norm = norm_from_string(j.at("norm").get<std::string>());
  r.validate();
}

namespace internal {

inline void check_categories(std::span<const int> x, int d) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 1 || x[i] > d) {
      throw InvalidInput("sample value " + std::to_string(x[i]) + " at position " +
                         std::to_string(i + 1) + " outside [1, " + std::to_string(d) +
                         "]");
    }
  }
}

template <MechanismSource S>
double tail_block_statistic(std::span<const int> x, const SupportSet& b,
                            double p0_tail, double alpha, S& src) {
  const double scale = noise_scale(alpha);
  double s = 0.0;
  for (int xi : x) s += (b.contains(xi) ? 0.0 : 1.0) + scale * src.laplace() - p0_tail;
  return s / static_cast<double>(x.size());
}

}  // namespace internal

// phi_B on 2n raw observations. The block size n is taken from the data;
// params.n_block is ignored.
template <MechanismSource S>
TestReport run_test_noninteractive(std::span<const int> x, const ProbVector& p0,
                                   PrivacyParams params, Norm norm, S& src) {
  if (x.size() % 2 != 0) {
    throw InvalidInput("run_test_noninteractive: sample length must be even");
  }
  if (x.size() < 4) {
    throw InvalidInput("run_test_noninteractive: need at least 2 users per block");
  }
  const int n = static_cast<int>(x.size() / 2);
  params.n_block = n;
  params.validate();
  internal::check_categories(x, p0.d());

  BSelection sel = select_B(p0, n, params.alpha, norm, Mode::kNonInteractive);
  const SupportSet& b = sel.b;

  SStatAccumulator acc(p0, b);
  std::vector<double> row(static_cast<std::size_t>(b.size()));
  for (int i = 0; i < n; ++i) {
    privatize_indicator_vector_into(x[static_cast<std::size_t>(i)], b, params.alpha,
                                    src, row);
    acc.add(row);
  }

  TestReport r;
  r.mode = Mode::kNonInteractive;
  r.norm = norm;
  r.s_b = acc.value();
  r.t_b = internal::tail_block_statistic(x.subspan(static_cast<std::size_t>(n)), b,
                                         tail_mass(p0, b), params.alpha, src);
  const CriticalValues cv = critical_values(n, b.size(), params);
  r.c1 = cv.c1;
  r.c2 = cv.c2;
  r.b_used = b;
  r.reject = r.decision();
  return r;
}

struct InteractiveOptions {
  // Replaces the stage-one estimate; test hook.
  std::optional<std::vector<double>> p_hat_override;
};

// psi_B on 3n raw observations. The block size n is taken from the data.
template <MechanismSource S>
TestReport run_test_interactive(std::span<const int> x, const ProbVector& p0,
                                PrivacyParams params, Norm norm, S& src,
                                const InteractiveOptions& options = {}) {
  if (x.size() % 3 != 0) {
    throw InvalidInput("run_test_interactive: sample length must be divisible by 3");
  }
  if (x.size() < 6) {
    throw InvalidInput("run_test_interactive: need at least 2 users per block");
  }
  const int n = static_cast<int>(x.size() / 3);
  const int d = p0.d();
  params.n_block = n;
  params.validate();
  internal::check_categories(x, d);
  const auto block = [&x, n](int k) {
    return x.subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(n),
                     static_cast<std::size_t>(n));
  };

  // Stage one: Laplace indicators over [d], averaged.
  std::vector<double> p_hat(static_cast<std::size_t>(d), 0.0);
  if (options.p_hat_override) {
    if (static_cast<int>(options.p_hat_override->size()) != d) {
      throw InvalidInput("run_test_interactive: p_hat override has wrong length");
    }
    p_hat = *options.p_hat_override;
  } else {
    const double scale = noise_scale(params.alpha);
    for (int xi : block(0)) {
      for (int j = 0; j < d; ++j) {
        p_hat[static_cast<std::size_t>(j)] +=
            (xi == j + 1 ? 1.0 : 0.0) + scale * src.laplace();
      }
    }
    for (double& v : p_hat) v /= n;
  }

  // Stage two: censored randomized response against p_hat.
  const Stage2Mechanism mech(p_hat, p0, params);
  double z_sum = 0.0;
  for (int xi : block(1)) z_sum += mech(xi, src).z;
  double centre = 0.0;
  for (int j = 1; j <= d; ++j) {
    centre += p0(j) * mech.censored()[static_cast<std::size_t>(j - 1)];
  }

  BSelection sel = select_B(p0, n, params.alpha, norm, Mode::kInteractive);
  const SupportSet& b = sel.b;

  TestReport r;
  r.mode = Mode::kInteractive;
  r.norm = norm;
  r.d_n = z_sum / n - centre;
  r.t_b = internal::tail_block_statistic(block(2), b, tail_mass(p0, b), params.alpha, src);
  const CriticalValues cv = critical_values(n, b.size(), params);
  r.c1 = cv.c1;
  r.c2 = cv.c2;
  r.c3 = cv.c3;
  r.b_used = b;
  r.reject = r.decision();
  return r;
}

template <MechanismSource S>
TestReport run_test(Mode mode, std::span<const int> x, const ProbVector& p0,
                    const PrivacyParams& params, Norm norm, S& src) {
  return mode == Mode::kNonInteractive
             ? run_test_noninteractive(x, p0, params, norm, src)
             : run_test_interactive(x, p0, params, norm, src);
}

}  // namespace ldpgof

#endif  // LDPGOF_TESTSTATS_HPP_
