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

#ifndef MFGMAJOR_LINALG_HPP_
#define MFGMAJOR_LINALG_HPP_

#include <Eigen/Dense>
#include <limits>

namespace mfgmajor {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Inverse by full-pivot LU. Throws SingularMatrixError when the estimated
// reciprocal condition number is below 4 eps; `time` is attached to the error.
Mat3 Inverse3(const Mat3& m,
              double time = std::numeric_limits<double>::quiet_NaN());

// exp(-tau M) and its integral int_0^tau exp(-v M) dv, both from one
// exponential of the augmented 6x6 block matrix. Valid for singular M.
struct ExpIntegral {
  Mat3 exp;
  Mat3 integral;
};
ExpIntegral ExpWithIntegral(const Mat3& m, double tau);

}  // namespace mfgmajor

#endif  // MFGMAJOR_LINALG_HPP_
