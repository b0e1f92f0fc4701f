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

#ifndef LENSTRACK_SCENE_HPP
#define LENSTRACK_SCENE_HPP

#include <cstdint>
#include <vector>

#include "lenstrack/types.hpp"

namespace lenstrack {

enum class PathKind { Los, Nlos };

// Per-path channel parameters. Angles are stored wrapped to (-pi, pi];
// theta is the BS-side angle (UL-AOA), phi the MS-side AOA in the MS local
// frame. gain is h_k scaled by sqrt(N_BS*N_MS/path_loss).
struct PathParams {
  double tau = 0.0;       // seconds
  double theta = 0.0;     // radians
  double phi = 0.0;       // radians
  Complex gain{0.0, 0.0};
  double path_loss = 1.0; // dimensionless power ratio, >= 1
  PathKind kind = PathKind::Los;
};

// Ground-truth 2-D geometry: BS at q, MS at p with rotation alpha, plus
// single-bounce scatterers.
struct Scene {
  Vec2 bs = Vec2::Zero();           // q
  Vec2 ms = Vec2::Zero();           // p
  double ms_rotation = 0.0;         // alpha in [0, 2*pi)
  std::vector<Vec2> scatterers;     // s_k

  // q != p and every scatterer distinct from both endpoints.
  bool valid() const;
};

struct CarrierConfig {
  double wavelength = 0.0;  // lambda_c, meters
  int n_bs = 0;
  int n_ms = 0;
};

struct SceneModelConfig {
  double nlos_reflection_loss = 10.0;   // power factor >= 1 on NLOS paths
  // Optional per-path |h_k| overrides (index 0 = LOS); default 1.
  std::vector<double> path_magnitudes;
};

// Friis-type path loss (4*pi*d/lambda)^2; NLOS paths additionally pay the
// configured reflection loss on the total path length.
double path_loss(double distance, PathKind kind, double wavelength,
                 double reflection_loss = 10.0);

// Converts geometry to path parameters. Path 0 is LOS; path k > 0 bounces
// off scatterer k-1. Gains carry uniformly random phases drawn from the
// seeded generator. Throws std::invalid_argument on degenerate geometry.
std::vector<PathParams> generate_paths(const Scene& scene, const CarrierConfig& carrier,
                                       std::uint64_t rng_seed,
                                       const SceneModelConfig& model = SceneModelConfig{});

}  // namespace lenstrack

#endif  // LENSTRACK_SCENE_HPP
