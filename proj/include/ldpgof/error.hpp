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

#ifndef LDPGOF_ERROR_HPP_
#define LDPGOF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ldpgof {

// Raised when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for parameter combinations that have no defined value, e.g. a
// family/norm/mode cell with no closed-form rate.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the separation search when the risk is still above the target
// level at the largest admissible distance.
class Saturated : public std::runtime_error {
 public:
  Saturated(const std::string& what, double delta_max)
      : std::runtime_error(what), delta_max_(delta_max) {}

  double delta_max() const noexcept { return delta_max_; }

 private:
  double delta_max_;
};

// Raised when an output file cannot be written; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ldpgof

#endif  // LDPGOF_ERROR_HPP_
