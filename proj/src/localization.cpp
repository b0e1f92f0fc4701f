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

#include "lenstrack/localization.hpp"

#include <cmath>
#include <stdexcept>

namespace lenstrack {

std::pair<Vec2, double> params_to_pose(const Vec2& bs, double tau0, double theta0,
                                       double phi0) {
  const Vec2 p = bs + kSpeedOfLight * tau0 * Vec2(std::cos(theta0), std::sin(theta0));
  const double alpha = wrap_two_pi(kPi + theta0 - phi0);
  return {p, alpha};
}

Eigen::Matrix2d conversion_matrix(double tau0, double theta0) {
  const double c = kSpeedOfLight;
  Eigen::Matrix2d t;
  // columns: d tau0/dp, d theta0/dp
  t(0, 0) = std::cos(theta0) / c;
  t(1, 0) = std::sin(theta0) / c;
  t(0, 1) = -std::sin(theta0) / (c * tau0);
  t(1, 1) = std::cos(theta0) / (c * tau0);
  return t;
}

std::pair<Eigen::Matrix2d, double> pose_covariance(double tau0, double theta0,
                                                   const Eigen::Matrix2d& tau_theta_cov,
                                                   double phi_var) {
  if (tau0 <= 0.0) throw std::invalid_argument("pose_covariance: tau0 must be positive");
  const double det = tau_theta_cov.determinant();
  if (!(std::abs(det) > 0.0)) {
    throw std::invalid_argument("pose_covariance: singular parameter covariance");
  }
  const Eigen::Matrix2d t = conversion_matrix(tau0, theta0);
  const Eigen::Matrix2d info = t * tau_theta_cov.inverse() * t.transpose();
  const Eigen::Matrix2d p_cov = info.inverse();
  const double alpha_var = tau_theta_cov(1, 1) + phi_var;
  return {p_cov, alpha_var};
}

Eigen::Matrix2d pose_covariance_forward(double tau0, double theta0,
                                        const Eigen::Matrix2d& tau_theta_cov) {
  // J = dp/d(tau,theta) = (T^T)^-1
  const Eigen::Matrix2d j = conversion_matrix(tau0, theta0).transpose().inverse();
  return j * tau_theta_cov * j.transpose();
}

}  // namespace lenstrack
