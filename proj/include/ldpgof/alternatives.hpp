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

#ifndef LDPGOF_ALTERNATIVES_HPP_
#define LDPGOF_ALTERNATIVES_HPP_

// Alternatives at a prescribed distance from p0.
//
//   mass_shift:       (1 - eps) p0 + eps e_d
//   paired_signs:     +/- eps with random signs on consecutive pairs of the
//                     B_size largest categories
//   random_direction: p0 plus a random mean-zero direction, repaired to stay
//                     on the simplex

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldpgof/distributions.hpp"
#include "ldpgof/error.hpp"
#include "ldpgof/random.hpp"
#include "ldpgof/teststats.hpp"

namespace ldpgof {

enum class AlternativeKind { kMassShift, kPairedSigns, kRandomDirection };

inline const char* to_string(AlternativeKind kind) {
  switch (kind) {
    case AlternativeKind::kMassShift:
      return "mass_shift";
    case AlternativeKind::kPairedSigns:
      return "paired_signs";
    case AlternativeKind::kRandomDirection:
      return "random_direction";
  }
  return "?";
}

inline AlternativeKind alternative_kind_from_string(const std::string& s) {
  if (s == "mass_shift") return AlternativeKind::kMassShift;
  if (s == "paired_signs") return AlternativeKind::kPairedSigns;
  if (s == "random_direction") return AlternativeKind::kRandomDirection;
  throw InvalidInput("unknown alternative kind '" + s + "'");
}

inline ProbVector mass_shift_alternative(const ProbVector& p0, double epsilon) {
  const int d = p0.d();
  const double hi = 1.0 - 1.0 / d;
  if (!(epsilon >= 0.0 && epsilon <= hi)) {
    throw InvalidInput("mass_shift: epsilon " + std::to_string(epsilon) +
                       " outside [0, 1 - 1/d]");
  }
  std::vector<double> q(p0.mass().begin(), p0.mass().end());
  for (double& v : q) v *= 1.0 - epsilon;
  q.back() += epsilon;
  return ProbVector::from_probabilities(std::move(q));
}

inline int default_pair_block(int d) { return d % 2 == 0 ? d : d - 1; }

// Perturbation with explicit signs, one per pair; used directly by tests.
inline ProbVector paired_signs_alternative(const ProbVector& p0, int b_size,
                                           double epsilon, std::span<const int> signs) {
  const int d = p0.d();
  if (b_size < 2 || b_size % 2 != 0 || b_size > d) {
    throw InvalidInput("paired_signs: B_size must be even and in [2, d], got " +
                       std::to_string(b_size));
  }
  if (!(epsilon >= 0.0)) throw InvalidInput("paired_signs: epsilon must be >= 0");
  if (static_cast<int>(signs.size()) != b_size / 2) {
    throw InvalidInput("paired_signs: need one sign per pair");
  }
  const std::vector<int> order = descending_order(p0);
  for (int k = 0; k < b_size; ++k) {
    const int j = order[static_cast<std::size_t>(k)];
    if (p0(j) < epsilon) {
      throw InvalidInput("paired_signs: epsilon " + std::to_string(epsilon) +
                         " exceeds p0 at category " + std::to_string(j));
    }
  }
  std::vector<double> q(p0.mass().begin(), p0.mass().end());
  for (int k = 0; k < b_size / 2; ++k) {
    const int s = signs[static_cast<std::size_t>(k)] >= 0 ? 1 : -1;
    const auto up = static_cast<std::size_t>(order[static_cast<std::size_t>(2 * k)] - 1);
    const auto dn = static_cast<std::size_t>(order[static_cast<std::size_t>(2 * k + 1)] - 1);
    q[up] += s * epsilon;
    q[dn] -= s * epsilon;
  }
  return ProbVector::from_probabilities(std::move(q));
}

template <MechanismSource S>
ProbVector paired_signs_alternative(const ProbVector& p0, int b_size, double epsilon,
                                    S& src) {
  std::vector<int> signs(static_cast<std::size_t>(std::max(b_size, 0) / 2));
  for (int& s : signs) s = src.uniform() < 0.5 ? 1 : -1;
  return paired_signs_alternative(p0, b_size, epsilon, signs);
}

inline double simplex_diameter(Norm norm) {
  return norm == Norm::kL1 ? 2.0 : std::sqrt(2.0);
}

// Returns nullopt when the positivity repair moves the distance more than 1%
// away from the target.
template <MechanismSource S>
std::optional<ProbVector> random_direction_alternative(const ProbVector& p0,
                                                       double target, Norm norm,
                                                       S& src) {
  if (!(target >= 0.0 && target <= simplex_diameter(norm))) {
    throw InvalidInput("random_direction: target " + std::to_string(target) +
                       " not achievable in " + to_string(norm));
  }
  if (target == 0.0) return p0;
  const int d = p0.d();
  if (d < 2) return std::nullopt;
  std::vector<double> u(static_cast<std::size_t>(d));
  double mean = 0.0;
  for (double& v : u) {
    v = 2.0 * src.uniform() - 1.0;
    mean += v;
  }
  mean /= d;
  double len = 0.0;
  for (double& v : u) {
    v -= mean;
    len += norm == Norm::kL1 ? std::abs(v) : v * v;
  }
  if (norm == Norm::kL2) len = std::sqrt(len);
  if (!(len > 0.0)) return std::nullopt;

  std::vector<double> q(static_cast<std::size_t>(d));
  double total = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    q[j] = std::max(0.0, p0.mass()[j] + u[j] * (target / len));
    total += q[j];
  }
  for (double& v : q) v /= total;
  ProbVector p = ProbVector::from_probabilities(std::move(q));
  const double dist = norm == Norm::kL1 ? l1_distance(p, p0) : l2_distance(p, p0);
  if (std::abs(dist - target) > 0.01 * target) return std::nullopt;
  return p;
}

struct AlternativeSpec {
  AlternativeKind kind = AlternativeKind::kPairedSigns;
  std::optional<double> epsilon;
  std::optional<double> target_distance;
  std::optional<Norm> norm;  // defaults to the experiment norm
  std::optional<int> b_size;  // paired_signs only; default largest even <= d
  std::optional<std::uint64_t> seed;

  void validate() const {
    if (!epsilon && !target_distance) {
      throw InvalidInput("alternative: one of epsilon or target_distance is required");
    }
    if (epsilon && !(*epsilon >= 0.0)) throw InvalidInput("alternative: epsilon < 0");
    if (target_distance && !(*target_distance >= 0.0)) {
      throw InvalidInput("alternative: target_distance < 0");
    }
    if (kind == AlternativeKind::kRandomDirection && !target_distance) {
      throw InvalidInput("alternative: random_direction needs target_distance");
    }
  }
};

// Distance of the mass shift per unit epsilon: 2(1 - p0(d)) in L1 and
// ||e_d - p0|| in L2.
inline double mass_shift_unit_distance(const ProbVector& p0, Norm norm) {
  const int d = p0.d();
  if (norm == Norm::kL1) return 2.0 * (1.0 - p0(d));
  double s = 0.0;
  for (int j = 1; j <= d; ++j) {
    const double v = (j == d ? 1.0 : 0.0) - p0(j);
    s += v * v;
  }
  return std::sqrt(s);
}

// Largest distance from p0 reachable by the given construction.
inline double max_alternative_distance(const ProbVector& p0, AlternativeKind kind,
                                       Norm norm, std::optional<int> b_size = {}) {
  const int d = p0.d();
  switch (kind) {
    case AlternativeKind::kMassShift:
      return (1.0 - 1.0 / d) * mass_shift_unit_distance(p0, norm);
    case AlternativeKind::kPairedSigns: {
      const int b = b_size.value_or(default_pair_block(d));
      if (b < 2) return 0.0;
      const std::vector<int> order = descending_order(p0);
      const double eps = p0(order[static_cast<std::size_t>(b - 1)]);
      return norm == Norm::kL1 ? b * eps : std::sqrt(static_cast<double>(b)) * eps;
    }
    case AlternativeKind::kRandomDirection:
      return simplex_diameter(norm);
  }
  return 0.0;
}

// Builds the alternative described by spec. Without an explicit epsilon the
// construction is scaled to the target distance in the alternative's norm (or
// default_norm). random_direction may fail the distance check; nullopt then.
template <MechanismSource S>
std::optional<ProbVector> realize_alternative(const ProbVector& p0,
                                              const AlternativeSpec& spec,
                                              Norm default_norm, S& src) {
  spec.validate();
  const Norm norm = spec.norm.value_or(default_norm);
  const int d = p0.d();
  switch (spec.kind) {
    case AlternativeKind::kMassShift: {
      double eps = 0.0;
      if (spec.epsilon) {
        eps = *spec.epsilon;
      } else {
        const double unit = mass_shift_unit_distance(p0, norm);
        if (*spec.target_distance > 0.0 && !(unit > 0.0)) {
          throw InvalidInput("mass_shift: p0 is a point mass at d; no shift possible");
        }
        eps = *spec.target_distance == 0.0 ? 0.0 : *spec.target_distance / unit;
      }
      return mass_shift_alternative(p0, eps);
    }
    case AlternativeKind::kPairedSigns: {
      const int b = spec.b_size.value_or(default_pair_block(d));
      double eps = 0.0;
      if (spec.epsilon) {
        eps = *spec.epsilon;
      } else {
        eps = norm == Norm::kL1 ? *spec.target_distance / b
                                : *spec.target_distance / std::sqrt(static_cast<double>(b));
        // A target equal to max_alternative_distance can round to just above
        // the positivity cap after the division.
        if (b >= 2 && b <= d) {
          const double cap = p0(descending_order(p0)[static_cast<std::size_t>(b - 1)]);
          if (eps > cap && eps <= cap * (1.0 + 1e-12)) eps = cap;
        }
      }
      return paired_signs_alternative(p0, b, eps, src);
    }
    case AlternativeKind::kRandomDirection:
      return random_direction_alternative(p0, *spec.target_distance, norm, src);
  }
  return std::nullopt;
}

inline void to_json(nlohmann::json& j, const AlternativeSpec& a) {
  j = nlohmann::json{{"kind", to_string(a.kind)}};
  if (a.epsilon) j["epsilon"] = *a.epsilon;
  if (a.target_distance) j["target_distance"] = *a.target_distance;
  if (a.norm) j["norm"] = to_string(*a.norm);
  if (a.b_size) j["b_size"] = *a.b_size;
  if (a.seed) j["seed"] = *a.seed;
}

inline void from_json(const nlohmann::json& j, AlternativeSpec& a) {
  static const char* const kKeys[] = {"kind",  "epsilon", "target_distance",
                                      "norm",  "b_size",  "seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw InvalidInput("alternative: unknown key '" + key + "'");
    }
  }
  a = AlternativeSpec{};
  a.kind = alternative_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("epsilon")) a.epsilon = j["epsilon"].get<double>();
  if (j.contains("target_distance")) a.target_distance = j["target_distance"].get<double>();
  if (j.contains("norm")) a.norm = norm_from_string(j["norm"].get<std::string>());
  if (j.contains("b_size")) a.b_size = j["b_size"].get<int>();
  if (j.contains("seed")) a.seed = j["seed"].get<std::uint64_t>();
}

}  // namespace ldpgof

#endif  // LDPGOF_ALTERNATIVES_HPP_
