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

#ifndef LDPGOF_SUPPORT_SET_HPP_
#define LDPGOF_SUPPORT_SET_HPP_

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "ldpgof/error.hpp"

namespace ldpgof {

// The main set B of a test, a nonempty subset of the categories {1, ..., d}.
// Members are kept in ascending order; the complement is the tail set.
class SupportSet {
 public:
  SupportSet(std::vector<int> members, int d) : members_(std::move(members)), d_(d) {
    if (d_ < 1) throw InvalidInput("SupportSet: d must be >= 1");
    if (members_.empty()) throw InvalidInput("SupportSet: B must be nonempty");
    std::sort(members_.begin(), members_.end());
    for (std::size_t k = 0; k < members_.size(); ++k) {
      const int j = members_[k];
      if (j < 1 || j > d_) {
        throw InvalidInput("SupportSet: index " + std::to_string(j) +
                           " outside [1, " + std::to_string(d_) + "]");
      }
      if (k > 0 && members_[k - 1] == j) {
        throw InvalidInput("SupportSet: duplicate index " + std::to_string(j));
      }
    }
  }

  static SupportSet full(int d) {
    std::vector<int> all(static_cast<std::size_t>(std::max(d, 0)));
    for (int j = 1; j <= d; ++j) all[static_cast<std::size_t>(j - 1)] = j;
    return SupportSet(std::move(all), d);
  }

  int d() const noexcept { return d_; }
  int size() const noexcept { return static_cast<int>(members_.size()); }
  std::span<const int> members() const noexcept { return members_; }

  bool contains(int j) const {
    return std::binary_search(members_.begin(), members_.end(), j);
  }

  std::vector<int> complement() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(d_ - size()));
    for (int j = 1; j <= d_; ++j) {
      if (!contains(j)) out.push_back(j);
    }
    return out;
  }

  bool operator==(const SupportSet&) const = default;

 private:
  std::vector<int> members_;
  int d_;
};

}  // namespace ldpgof

#endif  // LDPGOF_SUPPORT_SET_HPP_
