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

#ifndef LENSTRACK_TYPES_HPP
#define LENSTRACK_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace lenstrack {

using Complex = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

// Speed of light, m/s (0.299792 m/ns).
inline constexpr double kSpeedOfLight = 2.99792e8;

inline constexpr double kPi = 3.14159265358979323846;

// Wrap to (-pi, pi].
double wrap_pm_pi(double angle);

// Wrap to [0, 2*pi).
double wrap_two_pi(double angle);

// Shortest-arc difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

// Deterministic stream derivation: mixes a master seed with stream tags so
// that Monte Carlo workers own independent, reproducible generators.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0);

// One draw of circularly-symmetric complex Gaussian, E|z|^2 = 1.
Complex complex_gaussian(Rng& rng);

// Vector of i.i.d. CN(0, variance) entries.
CVec complex_gaussian_vector(int n, double variance, Rng& rng);

}  // namespace lenstrack

#endif  // LENSTRACK_TYPES_HPP
