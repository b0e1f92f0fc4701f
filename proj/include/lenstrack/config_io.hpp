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

#ifndef LENSTRACK_CONFIG_IO_HPP
#define LENSTRACK_CONFIG_IO_HPP

#include <string>

namespace lenstrack {

struct ExperimentConfig;

// Default desk-scale experiment: 32x32 arrays, 40 subcarriers over 200 MHz
// at 60 GHz, two single-bounce scatterers, the standard process-noise and
// trajectory settings.
ExperimentConfig default_config();

// Loads a JSON configuration; missing keys keep their defaults. Angles are
// given in degrees, delays in ns, rates per block; everything is converted
// to SI on load.
ExperimentConfig load_config(const std::string& path);

// Serializes the resolved configuration (same schema as the input file).
std::string config_to_json(const ExperimentConfig& cfg);

void write_config_echo(const ExperimentConfig& cfg, const std::string& path);

}  // namespace lenstrack

#endif  // LENSTRACK_CONFIG_IO_HPP
