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

#include "lenstrack/signaling.hpp"

#include <cmath>
#include <stdexcept>

namespace lenstrack {

int recommended_g(int n_elements, int k_max) {
  const double k1 = k_max + 1;
  return static_cast<int>(std::ceil(k1 * std::log(n_elements / k1)));
}

CMat SensingMatrix::omega(int subcarrier) const {
  CMat out(n_antennas(), n_beams());
  for (int g = 0; g < n_beams(); ++g) {
    out.col(g) = selector.col(g).cast<Complex>() *
                 (combiner_bb(g) * std::conj(tx_symbols(g, subcarrier)));
  }
  return out;
}

CMat SensingMatrix::operator_matrix(int subcarrier) const {
  return omega(subcarrier).adjoint();
}

SensingMatrix make_sensing_matrix(int n_antennas, const TrainingConfig& config,
                                  const OfdmConfig& ofdm, Rng& rng) {
  const int g = config.g_beams;
  if (g < 1) throw std::invalid_argument("make_sensing_matrix: g_beams must be >= 1");
  SensingMatrix s;
  s.selector = MatX(n_antennas, g);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int j = 0; j < g; ++j) {
    for (int i = 0; i < n_antennas; ++i) {
      s.selector(i, j) = coin(rng) ? 1.0 : -1.0;
    }
  }
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  s.combiner_bb = CVec(g);
  for (int j = 0; j < g; ++j) s.combiner_bb(j) = std::polar(1.0, phase(rng));
  s.tx_symbols = CMat::Ones(g, ofdm.n_subcarriers);
  if (!config.unit_baseband) {
    for (int j = 0; j < g; ++j) {
      for (int n = 0; n < ofdm.n_subcarriers; ++n) {
        s.tx_symbols(j, n) = std::polar(1.0, phase(rng));
      }
    }
  }
  return s;
}

std::vector<CVec> synthesize_training_rx(const std::vector<CVec>& h_sparse,
                                         const SensingMatrix& sensing, double noise_psd,
                                         Rng& rng) {
  const int n_ant = sensing.n_antennas();
  std::vector<CVec> y(h_sparse.size());
  for (std::size_t n = 0; n < h_sparse.size(); ++n) {
    const CMat op = sensing.operator_matrix(static_cast<int>(n));
    y[n] = op * h_sparse[n];
    if (noise_psd > 0.0) {
      // beamspace-white noise through the combiner: covariance N0*N_ant*F^H F
      const CVec beam_noise =
          complex_gaussian_vector(n_ant, noise_psd * n_ant, rng);
      y[n] += op * beam_noise;
    }
  }
  return y;
}

double noise_psd_for_snr(double snr_db, const SensingMatrix& sensing,
                         const std::vector<CVec>& h_sparse) {
  double signal_energy = 0.0;
  for (std::size_t n = 0; n < h_sparse.size(); ++n) {
    signal_energy += (sensing.operator_matrix(static_cast<int>(n)) * h_sparse[n]).squaredNorm();
  }
  if (signal_energy <= 0.0) {
    throw std::invalid_argument("noise_psd_for_snr: zero signal energy");
  }
  double noise_gain = 0.0;  // sum of ||f_g||^2 * N_ant over subcarriers
  const double n_ant = sensing.n_antennas();
  noise_gain = static_cast<double>(h_sparse.size()) * sensing.n_beams() * n_ant * n_ant;
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  return signal_energy / (snr_lin * noise_gain);
}

PilotBlock PilotBlock::uniform(int n_subcarriers, int m_streams) {
  PilotBlock p;
  p.symbols = CMat::Ones(n_subcarriers, m_streams) / std::sqrt(static_cast<double>(m_streams));
  return p;
}

CVec tracking_observation(const std::vector<PathParams>& paths, const Beamformer& tx,
                          const Beamformer& rx, const PilotBlock& pilots,
                          const ArrayConfig& bs, const ArrayConfig& ms,
                          const OfdmConfig& ofdm, LinkDirection direction) {
  const int n_sub = ofdm.n_subcarriers;
  const int m_rx = rx.n_streams();
  if (pilots.symbols.rows() != n_sub || pilots.symbols.cols() != tx.n_streams()) {
    throw std::invalid_argument("tracking_observation: pilot block shape mismatch");
  }
  const ArrayConfig& tx_array = direction == LinkDirection::Uplink ? ms : bs;
  const ArrayConfig& rx_array = direction == LinkDirection::Uplink ? bs : ms;
  if (tx.n_antennas() != tx_array.n_elements || rx.n_antennas() != rx_array.n_elements) {
    throw std::invalid_argument("tracking_observation: beamformer shape mismatch");
  }

  const CMat w_tx = tx.composed();
  const CMat w_rx = rx.composed();
  CVec out = CVec::Zero(n_sub * m_rx);
  for (const auto& path : paths) {
    const double tx_angle = direction == LinkDirection::Uplink ? path.phi : path.theta;
    const double rx_angle = direction == LinkDirection::Uplink ? path.theta : path.phi;
    // transmit coupling a^H W, receive coupling W^H a
    const CVec tx_coup = (w_tx.adjoint() * steering_vector(tx_array, tx_angle)).conjugate();
    const CVec rx_coup = w_rx.adjoint() * steering_vector(rx_array, rx_angle);
    const CVec u = pilots.symbols * tx_coup;  // per-subcarrier scalar
    for (int n = 0; n < n_sub; ++n) {
      out.segment(n * m_rx, m_rx) += subcarrier_gain(path, n, ofdm) * u(n) * rx_coup;
    }
  }
  return out;
}

CVec synthesize_tracking_rx(const std::vector<PathParams>& paths, const Beamformer& tx,
                            const Beamformer& rx, const PilotBlock& pilots,
                            const ArrayConfig& bs, const ArrayConfig& ms,
                            const OfdmConfig& ofdm, double noise_psd,
                            LinkDirection direction, Rng& rng) {
  CVec y = tracking_observation(paths, tx, rx, pilots, bs, ms, ofdm, direction);
  if (noise_psd > 0.0) {
    const CMat w_rx = rx.composed();
    const int m_rx = rx.n_streams();
    for (int n = 0; n < ofdm.n_subcarriers; ++n) {
      const CVec ant_noise = complex_gaussian_vector(rx.n_antennas(), noise_psd, rng);
      y.segment(n * m_rx, m_rx) += w_rx.adjoint() * ant_noise;
    }
  }
  return y;
}

CMat tracking_noise_covariance(const Beamformer& rx, double noise_psd) {
  const CMat w = rx.composed();
  return noise_psd * (w.adjoint() * w);
}

}  // namespace lenstrack
