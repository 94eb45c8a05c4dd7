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

#ifndef LDPGOF_RANDOM_HPP_
#define LDPGOF_RANDOM_HPP_

// Random streams used across the library.
//
// Every stochastic routine draws from a `MechanismSource`: anything that can
// produce a uniform double on [0, 1) and a standard Laplace(1) variate. `Rng`
// is the production source. Tests substitute deterministic sources to get
// noiseless mechanism outputs.
//
// Streams for independent Monte Carlo replications are derived from a master
// seed and a replication counter with `derive_seed`, so results never depend
// on how replications are scheduled.

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ldpgof {

// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the stream identified by (master, tags...). Distinct tag tuples
// give statistically independent streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// Maps 64 random bits to a double in [0, 1) with 53 bits of resolution.
constexpr double bits_to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Standard Laplace variate by inverse CDF. The uniform u lives on the
// symmetric grid (k + 1/2) * 2^-52 - 1/2, which never hits 0 or +-1/2, so the
// result is finite and exactly symmetric in distribution.
inline double bits_to_laplace(std::uint64_t bits) noexcept {
  const double u =
      (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52 - 0.5;
  const double magnitude = -std::log(1.0 - 2.0 * std::fabs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

template <class S>
concept MechanismSource = requires(S& s) {
  { s.uniform() } -> std::convertible_to<double>;
  { s.laplace() } -> std::convertible_to<double>;
};

// xoshiro256** seeded through SplitMix64.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept { reseed(seed); }

  void reseed(std::uint64_t seed) noexcept {
    for (std::size_t i = 0; i < state_.size(); ++i) {
      state_[i] = mix64(seed + i * 0x9e3779b97f4a7c15ULL);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() noexcept { return bits_to_unit((*this)()); }
  double laplace() noexcept { return bits_to_laplace((*this)()); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

static_assert(MechanismSource<Rng>);

}  // namespace ldpgof

#endif  // LDPGOF_RANDOM_HPP_
