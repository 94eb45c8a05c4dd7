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

#ifndef LDPGOF_DISTRIBUTIONS_HPP_
#define LDPGOF_DISTRIBUTIONS_HPP_

// Discrete distributions on {1, ..., d}.
//
// Categories are 1-based in every public interface; `mass()` exposes the
// underlying 0-based storage for tight loops.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ldpgof/error.hpp"
#include "ldpgof/random.hpp"
#include "ldpgof/support_set.hpp"

namespace ldpgof {

inline constexpr double kMassTolerance = 1e-12;

class ProbVector {
 public:
  // Validates an explicit probability vector: entries finite and >= 0,
  // summing to 1 within kMassTolerance.
  static ProbVector from_probabilities(std::vector<double> mass) {
    if (mass.empty()) throw InvalidInput("ProbVector: d must be >= 1");
    double total = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) {
      if (!std::isfinite(mass[k]) || mass[k] < 0.0) {
        throw InvalidInput("ProbVector: entry " + std::to_string(k + 1) +
                           " is negative or not finite");
      }
      total += mass[k];
    }
    if (std::fabs(total - 1.0) > kMassTolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", total);
      throw InvalidInput(std::string("ProbVector: entries sum to ") + buf);
    }
    return ProbVector(std::move(mass));
  }

  int d() const noexcept { return static_cast<int>(mass_.size()); }

  // 1-based access.
  double operator()(int j) const { return mass_[static_cast<std::size_t>(j - 1)]; }

  std::span<const double> mass() const noexcept { return mass_; }

  bool operator==(const ProbVector&) const = default;

 private:
  explicit ProbVector(std::vector<double> mass) : mass_(std::move(mass)) {}

  std::vector<double> mass_;
};

// Divides by the total once; fails on empty, all-zero, negative or
// non-finite weights.
inline ProbVector normalize(std::span<const double> weights) {
  if (weights.empty()) throw InvalidInput("normalize: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInput("normalize: weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw InvalidInput("normalize: all weights are zero");
  std::vector<double> mass(weights.size());
  for (std::size_t k = 0; k < weights.size(); ++k) mass[k] = weights[k] / total;
  return ProbVector::from_probabilities(std::move(mass));
}

enum class FamilyKind { kUniform, kNearlyUniform, kPolynomial, kExponential };

// A parametric family of null distributions:
//   uniform            p(j) = 1/d
//   nearly_uniform     p(j) ~ j^-beta,            beta in [0, 1)
//   polynomial         p(j) ~ j^-(1+beta),        beta > 0
//   exponential        p(j) ~ j^eta exp(-c j^beta), c > 0, beta > 0
struct FamilySpec {
  FamilyKind kind = FamilyKind::kUniform;
  int d = 1;
  double beta = 0.0;
  double eta = 0.0;
  double c = 1.0;

  void validate() const {
    if (d < 1) throw InvalidInput("FamilySpec: d must be >= 1");
    switch (kind) {
      case FamilyKind::kUniform:
        break;
      case FamilyKind::kNearlyUniform:
        if (!(beta >= 0.0 && beta < 1.0)) {
          throw InvalidInput("FamilySpec: nearly_uniform needs beta in [0, 1)");
        }
        break;
      case FamilyKind::kPolynomial:
        if (!(beta > 0.0) || !std::isfinite(beta)) {
          throw InvalidInput("FamilySpec: polynomial needs beta > 0");
        }
        break;
      case FamilyKind::kExponential:
        if (!(beta > 0.0) || !(c > 0.0) || !std::isfinite(eta) ||
            !std::isfinite(beta) || !std::isfinite(c)) {
          throw InvalidInput(
              "FamilySpec: exponential needs c > 0, beta > 0 and finite eta");
        }
        break;
    }
  }

  bool operator==(const FamilySpec&) const = default;
};

inline const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kUniform: return "uniform";
    case FamilyKind::kNearlyUniform: return "nearly_uniform";
    case FamilyKind::kPolynomial: return "polynomial";
    case FamilyKind::kExponential: return "exponential";
  }
  return "?";
}

inline FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "uniform") return FamilyKind::kUniform;
  if (name == "nearly_uniform") return FamilyKind::kNearlyUniform;
  if (name == "polynomial") return FamilyKind::kPolynomial;
  if (name == "exponential") return FamilyKind::kExponential;
  throw InvalidInput("unknown family kind '" + name + "'");
}

// "beta=1;eta=0;c=1"-style rendering of the parameters that matter for the
// kind; empty for uniform.
inline std::string family_params_string(const FamilySpec& spec) {
  char buf[128];
  switch (spec.kind) {
    case FamilyKind::kUniform:
      return "";
    case FamilyKind::kNearlyUniform:
    case FamilyKind::kPolynomial:
      std::snprintf(buf, sizeof buf, "beta=%g", spec.beta);
      return buf;
    case FamilyKind::kExponential:
      std::snprintf(buf, sizeof buf, "eta=%g;c=%g;beta=%g", spec.eta, spec.c,
                    spec.beta);
      return buf;
  }
  return "";
}

// Unnormalized weights. The exponential family is evaluated relative to its
// largest log-weight so that the top of the distribution never underflows.
inline std::vector<double> family_weights(const FamilySpec& spec) {
  spec.validate();
  const auto d = static_cast<std::size_t>(spec.d);
  std::vector<double> w(d);
  switch (spec.kind) {
    case FamilyKind::kUniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case FamilyKind::kNearlyUniform:
      for (std::size_t k = 0; k < d; ++k) {
        w[k] = std::pow(static_cast<double>(k + 1), -spec.beta);
      }
      break;
    case FamilyKind::kPolynomial:
      for (std::size_t k = 0; k < d; ++k) {
        w[k] = std::pow(static_cast<double>(k + 1), -1.0 - spec.beta);
      }
      break;
    case FamilyKind::kExponential: {
      std::vector<double> logw(d);
      for (std::size_t k = 0; k < d; ++k) {
        const double j = static_cast<double>(k + 1);
        logw[k] = spec.eta * std::log(j) - spec.c * std::pow(j, spec.beta);
      }
      const double top = *std::max_element(logw.begin(), logw.end());
      for (std::size_t k = 0; k < d; ++k) w[k] = std::exp(logw[k] - top);
      break;
    }
  }
  return w;
}

inline ProbVector make_family(const FamilySpec& spec) {
  const std::vector<double> w = family_weights(spec);
  return normalize(w);
}

inline void require_same_dimension(const ProbVector& p, const ProbVector& q) {
  if (p.d() != q.d()) {
    throw InvalidInput("dimension mismatch: " + std::to_string(p.d()) + " vs " +
                       std::to_string(q.d()));
  }
}

inline double l1_distance(const ProbVector& p, const ProbVector& q) {
  require_same_dimension(p, q);
  double s = 0.0;
  for (int j = 1; j <= p.d(); ++j) s += std::fabs(p(j) - q(j));
  return s;
}

inline double l2_distance(const ProbVector& p, const ProbVector& q) {
  require_same_dimension(p, q);
  double s = 0.0;
  for (int j = 1; j <= p.d(); ++j) s += (p(j) - q(j)) * (p(j) - q(j));
  return std::sqrt(s);
}

// Mass outside B.
inline double tail_mass(const ProbVector& p, const SupportSet& b) {
  if (b.d() != p.d()) {
    throw InvalidInput("tail_mass: support set is over [" + std::to_string(b.d()) +
                       "] but p has d = " + std::to_string(p.d()));
  }
  double s = 0.0;
  for (int j : b.complement()) s += p(j);
  return std::clamp(s, 0.0, 1.0);
}

// Inverse-CDF sampler over a precomputed cumulative table, O(log d) per draw.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const ProbVector& p) : cdf_(p.mass().size()) {
    std::partial_sum(p.mass().begin(), p.mass().end(), cdf_.begin());
    // Pin the top of the table so no uniform draw falls off the end; trailing
    // zero-mass categories keep their (unreachable) position.
    const auto last_positive = std::find_if(p.mass().rbegin(), p.mass().rend(),
                                            [](double m) { return m > 0.0; });
    const auto top = static_cast<std::size_t>(p.mass().rend() - last_positive) - 1;
    for (std::size_t k = top; k < cdf_.size(); ++k) cdf_[k] = 1.0;
    for (std::size_t k = 0; k < top; ++k) cdf_[k] = std::min(cdf_[k], 1.0);
  }

  int d() const noexcept { return static_cast<int>(cdf_.size()); }

  template <MechanismSource S>
  int operator()(S& src) const {
    const double u = src.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(it - cdf_.begin()) + 1;
  }

  template <MechanismSource S>
  void fill(std::span<int> out, S& src) const {
    for (int& x : out) x = (*this)(src);
  }

 private:
  std::vector<double> cdf_;
};

template <MechanismSource S>
std::vector<int> sample(const ProbVector& p, int n, S& src) {
  if (n < 1) throw InvalidInput("sample: n must be >= 1");
  CategoricalSampler sampler(p);
  std::vector<int> out(static_cast<std::size_t>(n));
  sampler.fill(out, src);
  return out;
}

// Permutation (1-based) listing categories by decreasing mass; ties keep the
// smaller index first.
inline std::vector<int> descending_order(const ProbVector& p) {
  std::vector<int> order(static_cast<std::size_t>(p.d()));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&p](int a, int b) { return p(a) > p(b); });
  return order;
}

}  // namespace ldpgof

#endif  // LDPGOF_DISTRIBUTIONS_HPP_
