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

#include "lenstrack/types.hpp"

#include <cmath>

namespace lenstrack {

double wrap_pm_pi(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

double angle_diff(double a, double b) { return wrap_pm_pi(a - b); }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
  // splitmix64 finalizer over the concatenated words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ tag_a) ^ tag_b);
}

Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  constexpr double half = 0.5;
  return {n01(rng) * std::sqrt(half), n01(rng) * std::sqrt(half)};
}

CVec complex_gaussian_vector(int n, double variance, Rng& rng) {
  CVec v(n);
  const double scale = std::sqrt(variance);
  for (int i = 0; i < n; ++i) v(i) = scale * complex_gaussian(rng);
  return v;
}

}  // namespace lenstrack
