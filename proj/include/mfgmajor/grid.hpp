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

#ifndef MFGMAJOR_GRID_HPP_
#define MFGMAJOR_GRID_HPP_

#include <vector>

namespace mfgmajor {

// Uniform grid 0 = t_0 < ... < t_n = T.
class TimeGrid {
 public:
  TimeGrid(double horizon, int n_steps);

  double horizon() const { return horizon_; }
  int n_steps() const { return n_steps_; }
  int n_points() const { return n_steps_ + 1; }
  double dt() const { return horizon_ / n_steps_; }
  // t_n is returned as the horizon exactly.
  double t(int k) const {
    return k == n_steps_ ? horizon_ : horizon_ * k / n_steps_;
  }
  std::vector<double> times() const;

  bool operator==(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && n_steps_ == other.n_steps_;
  }

 private:
  double horizon_;
  int n_steps_;
};

}  // namespace mfgmajor

#endif  // MFGMAJOR_GRID_HPP_
