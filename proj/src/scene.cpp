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

#include "lenstrack/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace lenstrack {

namespace {
constexpr double kMinSeparation = 1e-9;  // meters
}

bool Scene::valid() const {
  if ((bs - ms).norm() < kMinSeparation) return false;
  for (const auto& s : scatterers) {
    if ((s - bs).norm() < kMinSeparation || (s - ms).norm() < kMinSeparation) return false;
  }
  return true;
}

double path_loss(double distance, PathKind kind, double wavelength, double reflection_loss) {
  if (distance <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
  const double friis = std::pow(4.0 * kPi * distance / wavelength, 2);
  return kind == PathKind::Los ? friis : friis * reflection_loss;
}

std::vector<PathParams> generate_paths(const Scene& scene, const CarrierConfig& carrier,
                                       std::uint64_t rng_seed, const SceneModelConfig& model) {
  if (!scene.valid()) throw std::invalid_argument("generate_paths: degenerate geometry");
  if (carrier.wavelength <= 0.0) throw std::invalid_argument("generate_paths: wavelength");

  Rng rng(rng_seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double gain_scale = std::sqrt(static_cast<double>(carrier.n_bs) * carrier.n_ms);

  auto magnitude = [&](std::size_t k) {
    return k < model.path_magnitudes.size() ? model.path_magnitudes[k] : 1.0;
  };

  std::vector<PathParams> paths;
  paths.reserve(scene.scatterers.size() + 1);

  // LOS
  {
    const Vec2 diff = scene.ms - scene.bs;
    PathParams p;
    p.kind = PathKind::Los;
    p.tau = diff.norm() / kSpeedOfLight;
    p.theta = std::atan2(diff.y(), diff.x());
    p.phi = wrap_pm_pi(p.theta + kPi - scene.ms_rotation);
    p.path_loss = path_loss(diff.norm(), PathKind::Los, carrier.wavelength,
                            model.nlos_reflection_loss);
    p.gain = std::polar(magnitude(0) * gain_scale / std::sqrt(p.path_loss), phase(rng));
    paths.push_back(p);
  }

  for (std::size_t k = 0; k < scene.scatterers.size(); ++k) {
    const Vec2& s = scene.scatterers[k];
    const Vec2 to_s = s - scene.bs;
    const Vec2 ms_to_s = s - scene.ms;
    PathParams p;
    p.kind = PathKind::Nlos;
    const double total = to_s.norm() + ms_to_s.norm();
    p.tau = total / kSpeedOfLight;
    p.theta = std::atan2(to_s.y(), to_s.x());
    p.phi = wrap_pm_pi(std::atan2(ms_to_s.y(), ms_to_s.x()) - scene.ms_rotation);
    p.path_loss = path_loss(total, PathKind::Nlos, carrier.wavelength,
                            model.nlos_reflection_loss);
    p.gain = std::polar(magnitude(k + 1) * gain_scale / std::sqrt(p.path_loss), phase(rng));
    paths.push_back(p);
  }

  return paths;
}

}  // namespace lenstrack
