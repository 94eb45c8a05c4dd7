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

#ifndef LDPGOF_RATES_HPP_
#define LDPGOF_RATES_HPP_

// Closed-form separation radii. Upper bounds for the two tests carry their
// explicit constants where known; every other constant is normalized to 1 and
// the `source` field says so. log is the natural logarithm.

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ldpgof/distributions.hpp"
#include "ldpgof/error.hpp"
#include "ldpgof/privacy.hpp"
#include "ldpgof/support_set.hpp"
#include "ldpgof/teststats.hpp"

namespace ldpgof {

enum class BoundKind { kUpper, kLower };

inline const char* to_string(BoundKind kind) {
  return kind == BoundKind::kUpper ? "upper" : "lower";
}

struct RateBound {
  double value = 0.0;
  BoundKind kind = BoundKind::kUpper;
  Mode mode = Mode::kNonInteractive;
  Norm norm = Norm::kL1;
  std::string source;
  std::optional<int> j_achieving;
};

// Constant multiplying the interactive upper bound when the expectation
// constant c of D_n has been calibrated.
inline double interactive_upper_constant(double c, double gamma) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidInput("calibrated constant must lie in (0, 1)");
  const double e = std::exp(1.0);
  return std::max(std::sqrt(4.0 / gamma) * 2.0 * (e + 1.0) / ((e - 1.0) * c),
                  2560.0 / (std::sqrt(e) * c * c * gamma));
}

namespace internal {

// sorted[k] = k-th largest mass (0-based); tail[j] = mass beyond the top j.
struct SortedMasses {
  std::vector<double> sorted;
  std::vector<double> tail;
};

inline SortedMasses sorted_masses(const ProbVector& p0) {
  const std::vector<int> order = descending_order(p0);
  const std::size_t d = order.size();
  SortedMasses s{std::vector<double>(d), std::vector<double>(d + 1, 0.0)};
  for (std::size_t k = 0; k < d; ++k) s.sorted[k] = p0(order[k]);
  for (std::size_t j = d; j-- > 0;) s.tail[j] = s.tail[j + 1] + s.sorted[j];
  return s;
}

// Main-set term of each upper bound as a function of |B|.
inline double upper_main_term(double b, int n, const PrivacyParams& params, Norm norm,
                              Mode mode) {
  const double a2 = params.alpha * params.alpha;
  const double g2 = params.gamma * params.gamma;
  const double nn = n;
  if (mode == Mode::kNonInteractive) {
    const double k = norm == Norm::kL1 ? b * b * b : b;
    return 12.0 * std::pow(k / (nn * (nn - 1.0) * a2 * a2 * g2), 0.25);
  }
  return std::sqrt(b) / std::sqrt(nn * a2 * g2);
}

}  // namespace internal

// Upper bound on the separation radius achieved by the test of the given
// mode. Without B the bound is minimized over prefixes of the descending
// order of p0 and the minimizing prefix length is recorded. The interactive
// constant is 1 unless a calibrated expectation constant is supplied.
inline RateBound upper_bound(const ProbVector& p0, int n, const PrivacyParams& params,
                             Norm norm, Mode mode,
                             const std::optional<SupportSet>& b = std::nullopt,
                             std::optional<double> calibrated_c = std::nullopt) {
  params.validate();
  if (n < 2) throw InvalidInput("upper_bound: n must be >= 2");
  RateBound r;
  r.kind = BoundKind::kUpper;
  r.mode = mode;
  r.norm = norm;

  double scale = 8.0;
  if (mode == Mode::kNonInteractive) {
    r.source = "noninteractive upper bound, explicit constants";
  } else if (calibrated_c) {
    scale = interactive_upper_constant(*calibrated_c, params.gamma);
    char buf[96];
    std::snprintf(buf, sizeof buf, "interactive upper bound, calibrated c=%.6g",
                  *calibrated_c);
    r.source = buf;
  } else {
    scale = 1.0;
    r.source = "interactive upper bound, constants normalized";
  }

  if (mode == Mode::kInteractive && norm == Norm::kL2) {
    r.value = scale * internal::upper_main_term(1.0, n, params, norm, mode);
    return r;
  }

  if (b) {
    if (b->d() != p0.d()) throw InvalidInput("upper_bound: B built for a different d");
    r.value = scale * std::max(internal::upper_main_term(b->size(), n, params, norm, mode),
                               tail_mass(p0, *b));
    return r;
  }

  const internal::SortedMasses s = internal::sorted_masses(p0);
  double best = 0.0;
  int best_j = 0;
  for (int j = 1; j <= p0.d(); ++j) {
    const double v = std::max(internal::upper_main_term(j, n, params, norm, mode),
                              s.tail[static_cast<std::size_t>(j)]);
    if (best_j == 0 || v < best) {
      best = v;
      best_j = j;
    }
  }
  r.value = scale * best;
  r.j_achieving = best_j;
  return r;
}

namespace internal {

// The two competing terms of the lower bounds at index j (1-based) with
// sorted mass q = p0 at the j-th largest category.
inline double lower_first_term(int j, double root_n, Norm norm, Mode mode) {
  const double e = selection_exponent(norm, mode);
  return std::pow(static_cast<double>(j), e) / root_n;
}

inline double lower_second_term(int j, double q, Norm norm, Mode mode) {
  const double jj = j;
  const double denom = std::sqrt(std::log(2.0 * jj));
  if (mode == Mode::kInteractive) return q / denom;
  return (norm == Norm::kL1 ? jj : std::sqrt(jj)) * q / denom;
}

}  // namespace internal

// Lower bound on the separation radius over all mechanisms of the given kind,
// unit constants: max over j of min{first, second}, p0 in descending order.
inline RateBound lower_bound(const ProbVector& p0, int n, double alpha, Norm norm,
                             Mode mode) {
  if (n < 1) throw InvalidInput("lower_bound: n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  RateBound r;
  r.kind = BoundKind::kLower;
  r.mode = mode;
  r.norm = norm;
  r.source = std::string(to_string(mode)) + " lower bound, constants normalized";
  const double root_n = std::sqrt(static_cast<double>(n) * alpha * alpha);
  if (mode == Mode::kInteractive && norm == Norm::kL2) {
    r.value = 1.0 / root_n;
    return r;
  }
  const internal::SortedMasses s = internal::sorted_masses(p0);
  double best = 0.0;
  int best_j = 0;
  for (int j = 1; j <= p0.d(); ++j) {
    const double v = std::min(
        internal::lower_first_term(j, root_n, norm, mode),
        internal::lower_second_term(j, s.sorted[static_cast<std::size_t>(j - 1)], norm,
                                    mode));
    if (best_j == 0 || v > best) {
      best = v;
      best_j = j;
    }
  }
  r.value = best;
  r.j_achieving = best_j;
  return r;
}

struct CorollaryIndices {
  // Empty when no j satisfies the defining inequality.
  std::optional<int> l_star;
  std::optional<int> l_starstar;
  std::optional<int> l_tilde;
};

// Largest j at which the first lower-bound term does not exceed the second.
inline CorollaryIndices corollary_indices(const ProbVector& p0, int n, double alpha) {
  if (n < 1) throw InvalidInput("corollary_indices: n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  const internal::SortedMasses s = internal::sorted_masses(p0);
  const double root_n = std::sqrt(static_cast<double>(n) * alpha * alpha);
  auto last = [&](Norm norm, Mode mode) -> std::optional<int> {
    std::optional<int> found;
    for (int j = 1; j <= p0.d(); ++j) {
      const double q = s.sorted[static_cast<std::size_t>(j - 1)];
      if (internal::lower_first_term(j, root_n, norm, mode) <=
          internal::lower_second_term(j, q, norm, mode)) {
        found = j;
      }
    }
    return found;
  };
  return CorollaryIndices{last(Norm::kL1, Mode::kNonInteractive),
                          last(Norm::kL2, Mode::kNonInteractive),
                          last(Norm::kL1, Mode::kInteractive)};
}

// Cells of the family rate table with separate upper and lower expressions
// (uniform and polynomial, non-interactive L2) are selected by side.
enum class RateSide { kUpper, kLower };

inline bool table1_cell_is_split(FamilyKind kind, Norm norm, Mode mode) {
  return mode == Mode::kNonInteractive && norm == Norm::kL2 &&
         (kind == FamilyKind::kUniform || kind == FamilyKind::kPolynomial);
}

// Family rate with unit constants and no log-factor corrections.
inline double table1_rate(const FamilySpec& family, int n, double alpha, Norm norm,
                          Mode mode, RateSide side = RateSide::kUpper) {
  family.validate();
  if (n < 1) throw InvalidInput("table1_rate: n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("alpha must lie in (0, 1]");
  const double big_n = static_cast<double>(n) * alpha * alpha;
  const double root_n = std::sqrt(big_n);
  const double d = family.d;
  if (mode == Mode::kInteractive && norm == Norm::kL2) return 1.0 / root_n;

  const double beta = family.beta;
  const bool l1 = norm == Norm::kL1;
  const bool ni = mode == Mode::kNonInteractive;
  switch (family.kind) {
    case FamilyKind::kUniform:
      if (ni && l1) return std::pow(d, 0.75) / root_n;
      if (ni) {
        const double upper = std::pow(d, 0.25) / root_n;
        return side == RateSide::kUpper ? upper : std::min(upper, 1.0 / std::sqrt(d));
      }
      return std::sqrt(d) / root_n;
    case FamilyKind::kPolynomial:
      if (ni && l1) {
        return std::min(std::pow(big_n, -2.0 * beta / (4.0 * beta + 3.0)),
                        std::pow(d, 0.75) / root_n);
      }
      if (ni) {
        const double rate = side == RateSide::kUpper
                                ? std::pow(big_n, -2.0 * beta / (4.0 * beta + 1.0))
                                : std::pow(big_n, -(2.0 * beta + 1.0) / (4.0 * beta + 3.0));
        return std::min(rate, std::pow(d, 0.25) / root_n);
      }
      return std::min(std::pow(big_n, -2.0 * beta / (4.0 * beta + 2.0)),
                      std::sqrt(d) / root_n);
    case FamilyKind::kExponential: {
      if (!(big_n > 1.0)) {
        throw InvalidInput("table1_rate: exponential rows need n alpha^2 > 1");
      }
      const double k = ni ? (l1 ? 3.0 : 1.0) : 2.0;
      const double log_term = std::pow(std::log(big_n), k / (4.0 * beta));
      const double d_term = std::pow(d, k / 4.0);
      return std::min(log_term, d_term) / root_n;
    }
    case FamilyKind::kNearlyUniform:
      break;
  }
  throw Unsupported(std::string("no family rate for cell (") + to_string(family.kind) +
                    ", " + to_string(mode) + ", " + to_string(norm) + ")");
}

// One row of a rate table.
struct RateRow {
  FamilySpec family;
  int n = 0;
  double alpha = 0.0;
  Norm norm = Norm::kL1;
  Mode mode = Mode::kNonInteractive;
  std::string kind;
  double value = 0.0;
  std::optional<int> j_achieving;
};

struct RateGrid {
  std::vector<FamilySpec> families;
  std::vector<int> n_values;
  std::vector<double> alphas;
  double gamma = 0.05;
};

// For every (family, n, alpha, norm, mode) of the grid: the prefix-minimized
// upper bound, the lower bound and the family rate (both sides for split
// cells, omitted where the family has no closed form).
inline std::vector<RateRow> rate_table(const RateGrid& grid) {
  if (grid.families.empty() || grid.n_values.empty() || grid.alphas.empty()) {
    throw InvalidInput("rate_table: empty grid");
  }
  std::vector<RateRow> rows;
  for (const FamilySpec& family : grid.families) {
    const ProbVector p0 = make_family(family);
    for (int n : grid.n_values) {
      for (double alpha : grid.alphas) {
        const PrivacyParams params{alpha, grid.gamma, n};
        for (Norm norm : {Norm::kL1, Norm::kL2}) {
          for (Mode mode : {Mode::kNonInteractive, Mode::kInteractive}) {
            auto push = [&](std::string kind, double value, std::optional<int> j) {
              rows.push_back(RateRow{family, n, alpha, norm, mode, std::move(kind), value, j});
            };
            const RateBound up = upper_bound(p0, n, params, norm, mode);
            push("upper", up.value, up.j_achieving);
            const RateBound lo = lower_bound(p0, n, alpha, norm, mode);
            push("lower", lo.value, lo.j_achieving);
            if (family.kind == FamilyKind::kNearlyUniform &&
                !(mode == Mode::kInteractive && norm == Norm::kL2)) {
              continue;
            }
            if (table1_cell_is_split(family.kind, norm, mode)) {
              push("table1_upper",
                   table1_rate(family, n, alpha, norm, mode, RateSide::kUpper),
                   std::nullopt);
              push("table1_lower",
                   table1_rate(family, n, alpha, norm, mode, RateSide::kLower),
                   std::nullopt);
            } else {
              push("table1", table1_rate(family, n, alpha, norm, mode), std::nullopt);
            }
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace ldpgof

#endif  // LDPGOF_RATES_HPP_
