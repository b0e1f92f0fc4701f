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

#ifndef LENSTRACK_BEAMFORMING_HPP
#define LENSTRACK_BEAMFORMING_HPP

#include <vector>

#include "lenstrack/channel.hpp"
#include "lenstrack/types.hpp"

namespace lenstrack {

// Hybrid beamformer in antenna space: rf has constant-modulus (or +-1)
// entries per column, bb is the baseband part, and the composed product has
// unit Frobenius norm. The equivalent beamspace coefficients with respect to
// a lens U are (1/N) * U^H * composed().
struct Beamformer {
  CMat rf;  // N x M
  CMat bb;  // M x M_s

  CMat composed() const { return rf * bb; }
  int n_antennas() const { return static_cast<int>(rf.rows()); }
  int n_streams() const { return static_cast<int>(bb.cols()); }
};

// Center-to-center spacing of adjacent ULA beams whose patterns cross at
// -3 dB, found by bisection on the Dirichlet kernel at broadside.
double delta_phi_3db(const ArrayConfig& array);

// Minimum beam count ceil(sigma_max * N / 2) covering an angular spread of
// sigma_max radians. Throws when the result exceeds the array size.
int min_beam_count(double sigma_max, int n_elements);

// Bank of m_beams steering vectors spaced delta_phi_3db apart, centered on
// center_angle (odd m: center beam plus symmetric offsets; even m: offsets
// +-0.5, +-1.5, ... spacings). Beam centers are clamped away from end-fire.
Beamformer heuristic_beamformer(double center_angle, int m_beams, const ArrayConfig& array);

// OMP decomposition of a target beamformer onto m_rf lens columns with LS
// baseband; when one_bit is set, each selected column is replaced by the
// +-1 vector maximizing correlation over a 64-point common-phase grid and
// the baseband is re-solved. Composed norm is 1 after either route.
Beamformer hybrid_decompose(const Beamformer& target, const CMat& lens, int m_rf,
                            bool one_bit);

// Beamspace coefficient matrix (1/N) * U^H * composed(); applying its
// adjoint to a chi vector equals applying composed()^H to the steering
// vector at the same angle.
CMat beamspace_coefficients(const Beamformer& bf, const CMat& lens);

}  // namespace lenstrack

#endif  // LENSTRACK_BEAMFORMING_HPP
