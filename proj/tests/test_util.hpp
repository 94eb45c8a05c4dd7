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

#ifndef LDPGOF_TESTS_TEST_UTIL_HPP_
#define LDPGOF_TESTS_TEST_UTIL_HPP_

#include <cstddef>
#include <vector>

namespace ldpgof::testing {

// Noise source with all Laplace draws equal to zero. Uniform draws cycle
// through `uniforms` (0.5 if empty).
class NoiselessSource {
 public:
  NoiselessSource() = default;
  explicit NoiselessSource(std::vector<double> uniforms) : uniforms_(std::move(uniforms)) {}

  double uniform() {
    if (uniforms_.empty()) return 0.5;
    const double u = uniforms_[next_ % uniforms_.size()];
    ++next_;
    return u;
  }
  double laplace() { return 0.0; }

 private:
  std::vector<double> uniforms_;
  std::size_t next_ = 0;
};

// Replays fixed Laplace values in order, then zeros.
class ScriptedLaplace {
 public:
  explicit ScriptedLaplace(std::vector<double> values) : values_(std::move(values)) {}

  double uniform() { return 0.5; }
  double laplace() { return next_ < values_.size() ? values_[next_++] : 0.0; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

}  // namespace ldpgof::testing

#endif  // LDPGOF_TESTS_TEST_UTIL_HPP_
