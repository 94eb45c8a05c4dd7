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

#ifndef LDPGOF_PRIVACY_HPP_
#define LDPGOF_PRIVACY_HPP_

// Local privacy mechanisms.
//
//  * Laplace-perturbed indicators: user i with category x releases, for each
//    j in B, z_j = 1{x = j} + (2/alpha) W_j with W_j i.i.d. Laplace(1).
//  * Tail indicator: z = 1{x not in B} + (2/alpha) W.
//  * Two-stage censored randomized response: given a broadcast estimate
//    p_hat from stage one, user x releases +c*tau with probability
//    1/2 + [p_hat_x - p0_x]_tau / (2 c tau) and -c*tau otherwise, where
//    c = (e^alpha + 1)/(e^alpha - 1), tau = (n alpha^2)^-1/2 and [.]_tau
//    clamps to [-tau, tau].
//
// All mechanisms are alpha-LDP for alpha in (0, 1]; the verifier at the end
// of this file checks the property exactly for finite-output mechanisms.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ldpgof/distributions.hpp"
#include "ldpgof/error.hpp"
#include "ldpgof/random.hpp"
#include "ldpgof/support_set.hpp"

namespace ldpgof {

struct PrivacyParams {
  double alpha = 1.0;
  double gamma = 0.05;
  int n_block = 1;

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      throw InvalidInput("alpha must lie in (0, 1]");
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
      throw InvalidInput("gamma must lie in (0, 1)");
    }
    if (n_block < 1) throw InvalidInput("n_block must be >= 1");
  }

  // n * alpha^2, the effective sample size that drives every rate.
  double effective_n() const { return n_block * alpha * alpha; }
};

struct PrivateVectorRecord {
  std::vector<double> z;  // one coordinate per member of B, in B's order
};

struct Stage2Record {
  double z = 0.0;  // +-c_alpha * tau
};

template <MechanismSource S>
double laplace_draw(S& src, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidInput("laplace_draw: scale must be positive and finite");
  }
  return scale * src.laplace();
}

inline double noise_scale(double alpha) { return 2.0 / alpha; }

// Writes 1{x = j} + (2/alpha) W_j for j in B into `out` (size |B|).
template <MechanismSource S>
void privatize_indicator_vector_into(int x, const SupportSet& b, double alpha,
                                     S& src, std::span<double> out) {
  const double scale = noise_scale(alpha);
  const auto members = b.members();
  for (std::size_t k = 0; k < members.size(); ++k) {
    out[k] = (members[k] == x ? 1.0 : 0.0) + scale * src.laplace();
  }
}

template <MechanismSource S>
PrivateVectorRecord privatize_indicator_vector(int x, const SupportSet& b,
                                               const PrivacyParams& params,
                                               S& src) {
  params.validate();
  if (x < 1 || x > b.d()) {
    throw InvalidInput("privatize_indicator_vector: category " +
                       std::to_string(x) + " outside [1, " +
                       std::to_string(b.d()) + "]");
  }
  PrivateVectorRecord rec{std::vector<double>(static_cast<std::size_t>(b.size()))};
  privatize_indicator_vector_into(x, b, params.alpha, src, rec.z);
  return rec;
}

template <MechanismSource S>
double privatize_tail_indicator(int x, const SupportSet& b,
                                const PrivacyParams& params, S& src) {
  params.validate();
  if (x < 1 || x > b.d()) {
    throw InvalidInput("privatize_tail_indicator: category " + std::to_string(x) +
                       " outside [1, " + std::to_string(b.d()) + "]");
  }
  return (b.contains(x) ? 0.0 : 1.0) + noise_scale(params.alpha) * src.laplace();
}

inline double censor(double v, double tau) {
  if (v > tau) return tau;
  if (v < -tau) return -tau;
  return v;
}

inline double c_alpha(double alpha) {
  return (std::exp(alpha) + 1.0) / (std::exp(alpha) - 1.0);
}

inline double tau_of(int n, double alpha) {
  return 1.0 / std::sqrt(static_cast<double>(n) * alpha * alpha);
}

// Stage-two randomizer for a fixed broadcast p_hat. Holds the censored
// deviations so per-user work is one uniform draw.
class Stage2Mechanism {
 public:
  Stage2Mechanism(std::span<const double> p_hat, const ProbVector& p0,
                  const PrivacyParams& params)
      : level_(c_alpha(params.alpha) * tau_of(params.n_block, params.alpha)),
        tau_(tau_of(params.n_block, params.alpha)),
        censored_(p_hat.size()),
        plus_prob_(p_hat.size()) {
    params.validate();
    if (static_cast<int>(p_hat.size()) != p0.d()) {
      throw InvalidInput("Stage2Mechanism: p_hat has length " +
                         std::to_string(p_hat.size()) + ", expected d = " +
                         std::to_string(p0.d()));
    }
    for (std::size_t k = 0; k < p_hat.size(); ++k) {
      censored_[k] = censor(p_hat[k] - p0.mass()[k], tau_);
      plus_prob_[k] = 0.5 + censored_[k] / (2.0 * level_);
      // |censored| <= tau < c_alpha tau, so this is strictly inside (0, 1).
      if (!(plus_prob_[k] > 0.0 && plus_prob_[k] < 1.0)) {
        throw std::logic_error("Stage2Mechanism: probability left (0, 1)");
      }
    }
  }

  double level() const noexcept { return level_; }
  double tau() const noexcept { return tau_; }
  std::span<const double> censored() const noexcept { return censored_; }

  // P(Z = +level | X = x), 1-based x.
  double plus_probability(int x) const {
    return plus_prob_[static_cast<std::size_t>(x - 1)];
  }

  template <MechanismSource S>
  Stage2Record operator()(int x, S& src) const {
    return Stage2Record{src.uniform() < plus_probability(x) ? level_ : -level_};
  }

  // Rows are inputs 1..d, columns the outputs (+level, -level).
  std::vector<std::vector<double>> table() const {
    std::vector<std::vector<double>> t;
    t.reserve(plus_prob_.size());
    for (double q : plus_prob_) t.push_back({q, 1.0 - q});
    return t;
  }

 private:
  double level_;
  double tau_;
  std::vector<double> censored_;
  std::vector<double> plus_prob_;
};

template <MechanismSource S>
Stage2Record privatize_stage2(int x, std::span<const double> p_hat,
                              const ProbVector& p0, const PrivacyParams& params,
                              S& src) {
  if (x < 1 || x > p0.d()) {
    throw InvalidInput("privatize_stage2: category " + std::to_string(x) +
                       " outside [1, " + std::to_string(p0.d()) + "]");
  }
  return Stage2Mechanism(p_hat, p0, params)(x, src);
}

struct LdpCheck {
  bool ok = false;
  double max_log_ratio = 0.0;  // +infinity when some output separates inputs
};

// Exact alpha-LDP check for a mechanism with finite output alphabet. Row x of
// `table` is the conditional distribution of the output given input x.
inline LdpCheck verify_ldp_finite(const std::vector<std::vector<double>>& table,
                                  double alpha) {
  if (table.empty()) throw InvalidInput("verify_ldp_finite: empty table");
  const std::size_t outputs = table.front().size();
  for (std::size_t x = 0; x < table.size(); ++x) {
    if (table[x].size() != outputs) {
      throw InvalidInput("verify_ldp_finite: ragged table");
    }
    double total = 0.0;
    for (double v : table[x]) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InvalidInput("verify_ldp_finite: entries must be finite and >= 0");
      }
      total += v;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw InvalidInput("verify_ldp_finite: row " + std::to_string(x + 1) +
                         " does not sum to 1");
    }
  }
  double worst = 0.0;
  for (std::size_t z = 0; z < outputs; ++z) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& row : table) {
      hi = std::max(hi, row[z]);
      lo = std::min(lo, row[z]);
    }
    if (hi == 0.0) continue;
    if (lo == 0.0) {
      worst = std::numeric_limits<double>::infinity();
      break;
    }
    worst = std::max(worst, std::log(hi) - std::log(lo));
  }
  return LdpCheck{worst <= alpha + 1e-12, worst};
}

// Log density of the Laplace indicator-vector release z (coordinates over B)
// for input category x.
inline double laplace_vector_log_density(std::span<const double> z, int x,
                                         const SupportSet& b, double alpha) {
  const auto members = b.members();
  if (z.size() != members.size()) {
    throw InvalidInput("laplace_vector_log_density: z has wrong length");
  }
  const double rate = alpha / 2.0;
  double s = 0.0;
  for (std::size_t k = 0; k < members.size(); ++k) {
    const double centre = members[k] == x ? 1.0 : 0.0;
    s += std::log(rate / 2.0) - rate * std::fabs(z[k] - centre);
  }
  return s;
}

// Worst-case log density ratio of the indicator-vector mechanism over all
// input pairs and all outputs. The ratio factorizes over coordinates, so each
// coordinate is maximized separately over a grid that includes points on
// both sides of both indicator values.
inline double laplace_vector_max_log_ratio(const SupportSet& b, double alpha) {
  static constexpr double kGrid[] = {-2.0, -1.0, -0.5, 0.0, 0.25, 0.5,
                                     0.75, 1.0,  1.5,  2.0, 3.0};
  const double rate = alpha / 2.0;
  double worst = 0.0;
  for (int x = 1; x <= b.d(); ++x) {
    for (int y = 1; y <= b.d(); ++y) {
      if (x == y) continue;
      double total = 0.0;
      for (int j : b.members()) {
        const double cx = j == x ? 1.0 : 0.0;
        const double cy = j == y ? 1.0 : 0.0;
        double best = -std::numeric_limits<double>::infinity();
        for (double v : kGrid) {
          best = std::max(best, rate * (std::fabs(v - cy) - std::fabs(v - cx)));
        }
        total += best;
      }
      worst = std::max(worst, total);
    }
  }
  return worst;
}

}  // namespace ldpgof

#endif  // LDPGOF_PRIVACY_HPP_
