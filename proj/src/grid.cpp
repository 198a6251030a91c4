// Copyright 2026 The mfgmajor Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mfgmajor/grid.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mfgmajor/errors.hpp"

namespace mfgmajor {

TimeGrid::TimeGrid(double horizon, int n_steps)
    : horizon_(horizon), n_steps_(n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError(fmt::format("grid horizon must be positive (got {})", horizon));
  }
  if (n_steps < 2) {
    throw DomainError(fmt::format("grid needs at least 2 steps (got {})", n_steps));
  }
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(n_points());
  for (int k = 0; k <= n_steps_; ++k) out[k] = t(k);
  return out;
}

}  // namespace mfgmajor
