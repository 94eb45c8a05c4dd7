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

#ifndef LDPGOF_LDPGOF_HPP_
#define LDPGOF_LDPGOF_HPP_

#include "ldpgof/alternatives.hpp"
#include "ldpgof/csv.hpp"
#include "ldpgof/distributions.hpp"
#include "ldpgof/error.hpp"
#include "ldpgof/harness.hpp"
#include "ldpgof/privacy.hpp"
#include "ldpgof/random.hpp"
#include "ldpgof/rates.hpp"
#include "ldpgof/support_set.hpp"
#include "ldpgof/teststats.hpp"
#include "ldpgof/version.hpp"

#endif  // LDPGOF_LDPGOF_HPP_
