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

#ifndef LENSTRACK_SIGNALING_HPP
#define LENSTRACK_SIGNALING_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "lenstrack/beamforming.hpp"
#include "lenstrack/channel.hpp"
#include "lenstrack/scene.hpp"
#include "lenstrack/types.hpp"

namespace lenstrack {

struct TrainingConfig {
  int g_beams = 16;          // G, sequential transmissions
  int v_elements = 3;        // V, strongest elements kept per path
  double p_fa = 1e-3;        // CFAR false alarm probability
  double noise_psd = 0.0;    // N0; ignored when snr_db is set
  std::optional<double> snr_db;
  std::uint64_t rng_seed = 0;
  int max_paths = 8;         // iteration cap for the sparse recovery loop
  bool unit_baseband = true; // x_BB = 1 for all g, n (the default pilot choice)
};

// Recommended number of sequential transmissions
// ceil((k_max+1) * ln(N / (k_max+1))).
int recommended_g(int n_elements, int k_max);

// Per-subcarrier sensing matrix Omega[n] of shape N x G, stored factored:
// column g of Omega[n] is selector.col(g) * combiner_bb(g) * conj(tx_symbols(g, n)).
// The received training signal is y[n] = Omega[n]^H h[n] + noise.
struct SensingMatrix {
  MatX selector;   // N x G, entries in {-1, +1} (1-bit adaptive network)
  CVec combiner_bb;// G, unit-modulus baseband combiner scalars
  CMat tx_symbols; // G x N, unit-modulus precoded transmit pilots

  int n_antennas() const { return static_cast<int>(selector.rows()); }
  int n_beams() const { return static_cast<int>(selector.cols()); }
  int n_subcarriers() const { return static_cast<int>(tx_symbols.cols()); }

  CMat omega(int subcarrier) const;    // N x G
  CMat operator_matrix(int subcarrier) const;  // Omega^H, G x N
};

SensingMatrix make_sensing_matrix(int n_antennas, const TrainingConfig& config,
                                  const OfdmConfig& ofdm, Rng& rng);

// y[n] = Omega[n]^H h[n] + n[n]; the combined noise has exact covariance
// N0 * N_ant * F^H F, realized by combining beamspace-white noise of
// per-entry variance N0 * N_ant.
std::vector<CVec> synthesize_training_rx(const std::vector<CVec>& h_sparse,
                                         const SensingMatrix& sensing, double noise_psd,
                                         Rng& rng);

// N0 making the received-SNR ratio (signal energy over expected combined
// noise energy, all subcarriers) hit the target. Throws on zero signal.
double noise_psd_for_snr(double snr_db, const SensingMatrix& sensing,
                         const std::vector<CVec>& h_sparse);

// Pilot block X0, one row per subcarrier. Default all-ones scaled 1/sqrt(M).
struct PilotBlock {
  CMat symbols;  // N x M

  static PilotBlock uniform(int n_subcarriers, int m_streams);
};

enum class LinkDirection { Uplink, Downlink };

// Noiseless tracking observation stacked over subcarriers:
//   block n = u_n * a_n(tau_k) * W_rx^H a_rx(angle_rx),
//   u_n = x_n^T * conj(W_tx^H a_tx(angle_tx)),
// summed over paths. Uplink: tx side MS (phi), rx side BS (theta); downlink
// swaps the roles. Output length N * M_rx.
CVec tracking_observation(const std::vector<PathParams>& paths, const Beamformer& tx,
                          const Beamformer& rx, const PilotBlock& pilots,
                          const ArrayConfig& bs, const ArrayConfig& ms,
                          const OfdmConfig& ofdm, LinkDirection direction);

// tracking_observation plus combined receive noise W_rx^H n with antenna
// noise of per-entry variance noise_psd.
CVec synthesize_tracking_rx(const std::vector<PathParams>& paths, const Beamformer& tx,
                            const Beamformer& rx, const PilotBlock& pilots,
                            const ArrayConfig& bs, const ArrayConfig& ms,
                            const OfdmConfig& ofdm, double noise_psd,
                            LinkDirection direction, Rng& rng);

// Per-subcarrier covariance of the combined receive noise, N0 * W^H W
// (equivalently N0 * N_ant * F^H F in beamspace coefficients).
CMat tracking_noise_covariance(const Beamformer& rx, double noise_psd);

}  // namespace lenstrack

#endif  // LENSTRACK_SIGNALING_HPP
