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

#ifndef LENSTRACK_CHANNEL_HPP
#define LENSTRACK_CHANNEL_HPP

#include <vector>

#include "lenstrack/scene.hpp"
#include "lenstrack/types.hpp"

namespace lenstrack {

// Uniform linear array behind a lens (DFT) front end.
//
// Antenna and lens-beam indices follow the symmetric convention
// m, p in {-(N-1)/2, ..., (N-1)/2} (half-integers when N is even). Storage
// is 0-based; sym_index maps storage index i to the symmetric index
// i - (N-1)/2. This is the single place where the two conventions meet.
struct ArrayConfig {
  int n_elements = 0;
  double spacing = 0.0;     // meters
  double wavelength = 0.0;  // meters

  static ArrayConfig half_wavelength(int n, double lambda) {
    return ArrayConfig{n, lambda / 2.0, lambda};
  }

  double sym_index(int i) const { return i - (n_elements - 1) / 2.0; }

  // Normalized spatial frequency d/lambda * sin(angle).
  double spatial_freq(double angle) const;

  // Physical angle of the lens beam at storage index i (arcsin grid).
  double beam_angle(int i) const;

  // Angular width of one beamspace grid cell around `angle` (arcsin spacing).
  double grid_cell_width(double angle) const;
};

struct OfdmConfig {
  int n_subcarriers = 0;     // N
  double bandwidth = 0.0;    // Hz; T_s = 1/B
  int cp_length = 0;         // D, in symbols
  double carrier_freq = 0.0; // Hz

  double sample_period() const { return 1.0 / bandwidth; }
  double cp_duration() const { return cp_length * sample_period(); }
  double wavelength() const { return kSpeedOfLight / carrier_freq; }
};

// Unit-norm ULA steering vector; entry at symmetric index m is
// (1/sqrt(N)) * exp(j*2*pi*m*(d/lambda)*sin(angle)).
CVec steering_vector(const ArrayConfig& array, double angle);

// Derivative of steering_vector with respect to the physical angle.
CVec steering_vector_deriv(const ArrayConfig& array, double angle);

// Lens (DFT) matrix; column p has entries exp(j*2*pi*m*p/N) over symmetric
// antenna indices m. Columns are unnormalized: U^H U = N*I.
CMat lens_matrix(const ArrayConfig& array);

// Dirichlet kernel sin(pi*N*x) / (sqrt(N) * sin(pi*x)); the removable
// singularity at integer x is evaluated by series.
double chi_kernel(int n_elements, double x);

// d/dx of chi_kernel.
double chi_kernel_deriv(int n_elements, double x);

// chi vector over the symmetric beam grid: entry i holds
// chi(d/lambda*sin(angle) - sym_index(i)/N). Equals U^H a(angle).
VecX chi_vector(const ArrayConfig& array, double angle);

// Derivative of chi_vector with respect to the physical angle.
VecX chi_vector_deriv(const ArrayConfig& array, double angle);

// gamma_n(h_k, tau_k) = h_k * exp(-j*2*pi*n*tau_k/(N*T_s)).
Complex subcarrier_gain(const PathParams& path, int subcarrier, const OfdmConfig& ofdm);

// Per-subcarrier beamspace channel matrices, N_MS x N_BS (downlink).
using BeamspaceChannel = std::vector<CMat>;

// Downlink beamspace channel via the definition U_MS^H H[n] U_BS with
// H[n] = sum_k gamma_n * a_MS(phi_k) a_BS(theta_k)^H.
BeamspaceChannel beamspace_channel_direct(const std::vector<PathParams>& paths,
                                          const ArrayConfig& bs, const ArrayConfig& ms,
                                          const OfdmConfig& ofdm);

// Same channel in closed form: entry (i, i') is
// sum_k gamma_n * chi_MS(d/lambda*sin(phi_k) - i/N_MS)
//              * chi_BS(d/lambda*sin(theta_k) - i'/N_BS).
BeamspaceChannel beamspace_channel_closed(const std::vector<PathParams>& paths,
                                          const ArrayConfig& bs, const ArrayConfig& ms,
                                          const OfdmConfig& ofdm);

enum class ArraySide { Ms, Bs };

// Sparse beamspace vector seen during training after the peer side transmits
// through an all-ones splitter:
//   MS side: sqrt(N_BS) * sum_k gamma_n * chi_MS,k
//   BS side: sqrt(N_MS) * sum_k gamma_n * chi_BS,k
std::vector<CVec> sparse_beamspace_vector(const std::vector<PathParams>& paths,
                                          const ArrayConfig& own, const ArrayConfig& peer,
                                          const OfdmConfig& ofdm, ArraySide side);

}  // namespace lenstrack

#endif  // LENSTRACK_CHANNEL_HPP
