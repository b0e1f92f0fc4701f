// SPDX-License-Identifier: Apache-2.0
//
// lenstrack: beamspace lens-MIMO channel training, tracking, and localization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LENSTRACK_LOCALIZATION_HPP
#define LENSTRACK_LOCALIZATION_HPP

#include <utility>

#include "lenstrack/types.hpp"

namespace lenstrack {

struct PoseEstimate {
  Vec2 position = Vec2::Zero();
  double rotation = 0.0;                 // radians in [0, 2*pi)
  Eigen::Matrix2d position_cov = Eigen::Matrix2d::Zero();
  double rotation_var = 0.0;
};

// LOS geometry inversion:
//   p = q + c*tau0*[cos(theta0), sin(theta0)],  alpha = pi + theta0 - phi0.
std::pair<Vec2, double> params_to_pose(const Vec2& bs, double tau0, double theta0,
                                       double phi0);

// Conversion matrix T(tau0, theta0) = [d tau0/dp, d theta0/dp], 2x2 with the
// partials as columns.
Eigen::Matrix2d conversion_matrix(double tau0, double theta0);

// Uncertainty propagation:
//   P_p = (T * C^-1 * T^T)^-1 with C the 2x2 (tau, theta) covariance,
//   P_alpha = var(theta) + var(phi).
// Throws std::invalid_argument when C is singular.
std::pair<Eigen::Matrix2d, double> pose_covariance(double tau0, double theta0,
                                                   const Eigen::Matrix2d& tau_theta_cov,
                                                   double phi_var);

// First-order forward propagation J * C * J^T with J the inverse of the
// conversion-matrix transpose; algebraically equal to pose_covariance's
// position output and kept as the cross-check route.
Eigen::Matrix2d pose_covariance_forward(double tau0, double theta0,
                                        const Eigen::Matrix2d& tau_theta_cov);

}  // namespace lenstrack

#endif  // LENSTRACK_LOCALIZATION_HPP
