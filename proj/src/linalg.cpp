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

#include "mfgmajor/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "mfgmajor/errors.hpp"

namespace mfgmajor {

Mat3 Inverse3(const Mat3& m, double time) {
  const Eigen::FullPivLU<Mat3> lu(m);
  const double rcond = m.allFinite() ? lu.rcond() : 0.0;
  if (!lu.isInvertible() || !(rcond > 4.0 * std::numeric_limits<double>::epsilon())) {
    throw SingularMatrixError(
        fmt::format("singular 3x3 matrix (reciprocal condition {:.3e}) at t = {}", rcond,
                    time),
        time);
  }
  return lu.inverse();
}

ExpIntegral ExpWithIntegral(const Mat3& m, double tau) {
  Eigen::Matrix<double, 6, 6> big = Eigen::Matrix<double, 6, 6>::Zero();
  big.topLeftCorner<3, 3>() = -tau * m;
  big.topRightCorner<3, 3>() = tau * Mat3::Identity();
  const Eigen::Matrix<double, 6, 6> e = big.exp();
  return {e.topLeftCorner<3, 3>(), e.topRightCorner<3, 3>()};
}

}  // namespace mfgmajor
