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

#include "lenstrack/tracking.hpp"

#include <cmath>
#include <stdexcept>

namespace lenstrack {

MatX make_transition(int dim, double t_b) {
  if (dim % 2 != 0) throw std::invalid_argument("make_transition: dimension must be even");
  const int k = dim / 2;
  MatX phi = MatX::Identity(dim, dim);
  phi.topRightCorner(k, k) = t_b * MatX::Identity(k, k);
  return phi;
}

MatX discretize_process_noise(const VecX& sigmas, double t_b) {
  const int k = static_cast<int>(sigmas.size());
  MatX q = MatX::Zero(2 * k, 2 * k);
  for (int i = 0; i < k; ++i) {
    const double s2 = sigmas(i) * sigmas(i);
    q(i, i) = s2 * t_b * t_b * t_b / 3.0;
    q(i, k + i) = s2 * t_b * t_b / 2.0;
    q(k + i, i) = q(i, k + i);
    q(k + i, k + i) = s2 * t_b;
  }
  return q;
}

std::pair<TrackState, TrackState> init_state(const LosParamEstimate& first,
                                             const LosParamEstimate& second, double t_b,
                                             const InitUncertainty& unc) {
  if (t_b <= 0.0) throw std::invalid_argument("init_state: t_b must be positive");
  TrackState ul;
  ul.t_b = t_b;
  ul.block_index = 1;
  ul.psi = VecX(4);
  ul.psi << second.tau, second.theta, (second.tau - first.tau) / t_b,
      angle_diff(second.theta, first.theta) / t_b;
  VecX ul_var(4);
  ul_var << unc.tau_var, unc.theta_var, unc.rate_scale * unc.tau_var / (t_b * t_b),
      unc.rate_scale * unc.theta_var / (t_b * t_b);
  ul.cov = ul_var.asDiagonal();

  TrackState dl;
  dl.t_b = t_b;
  dl.block_index = 1;
  dl.psi = VecX(2);
  dl.psi << second.phi, angle_diff(second.phi, first.phi) / t_b;
  VecX dl_var(2);
  dl_var << unc.phi_var, unc.rate_scale * unc.phi_var / (t_b * t_b);
  dl.cov = dl_var.asDiagonal();
  return {ul, dl};
}

MeasurementModel measurement_model(const VecX& tracked_params, const TrackingLink& link) {
  const bool uplink = link.direction == LinkDirection::Uplink;
  const double tau = uplink ? tracked_params(0) : link.fixed_tau;
  const double theta = uplink ? tracked_params(1) : link.fixed_theta;
  const double phi = uplink ? link.fixed_phi : tracked_params(0);

  const ArrayConfig& tx_array = uplink ? link.ms : link.bs;
  const ArrayConfig& rx_array = uplink ? link.bs : link.ms;
  const double tx_angle = uplink ? phi : theta;
  const double rx_angle = uplink ? theta : phi;

  const CMat w_tx = link.tx.composed();
  const CMat w_rx = link.rx.composed();
  const CVec tx_coup = (w_tx.adjoint() * steering_vector(tx_array, tx_angle)).conjugate();
  const CVec rx_coup = w_rx.adjoint() * steering_vector(rx_array, rx_angle);
  const CVec rx_coup_d = w_rx.adjoint() * steering_vector_deriv(rx_array, rx_angle);
  const CVec u = link.pilots.symbols * tx_coup;

  const int n_sub = link.ofdm.n_subcarriers;
  const int m_rx = link.rx.n_streams();
  const int n_tracked = static_cast<int>(tracked_params.size());
  const double t_symbol = n_sub * link.ofdm.sample_period();

  MeasurementModel mm;
  mm.prediction = CVec::Zero(n_sub * m_rx);
  mm.jacobian = CMat::Zero(n_sub * m_rx, n_tracked);
  for (int n = 0; n < n_sub; ++n) {
    const Complex phase = std::polar(1.0, -2.0 * kPi * n * tau / t_symbol);
    const Complex common = link.gain * phase * u(n);
    mm.prediction.segment(n * m_rx, m_rx) = common * rx_coup;
    if (uplink) {
      const Complex dtau = Complex(0.0, -2.0 * kPi * n / t_symbol);
      mm.jacobian.col(0).segment(n * m_rx, m_rx) = dtau * common * rx_coup;
      mm.jacobian.col(1).segment(n * m_rx, m_rx) = common * rx_coup_d;
    } else {
      mm.jacobian.col(0).segment(n * m_rx, m_rx) = common * rx_coup_d;
    }
  }
  return mm;
}

Complex estimate_gain(const CVec& observation, const CVec& unit_gain_template) {
  const double den = unit_gain_template.squaredNorm();
  if (den <= 0.0) return {0.0, 0.0};
  return (unit_gain_template.adjoint() * observation)(0) / den;
}

namespace {

void symmetrize_floor(MatX& p) {
  p = ((p + p.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<MatX> es(p);
  if (es.eigenvalues().minCoeff() < 0.0) {
    VecX vals = es.eigenvalues().cwiseMax(0.0);
    p = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
  }
}

}  // namespace

EkfStepResult ekf_step(TrackState& state, const CVec& observation, const CMat& noise_block,
                       const std::function<MeasurementModel(const VecX&)>& model,
                       const MatX& transition, const MatX& process_noise) {
  EkfStepResult result;
  const int dim = static_cast<int>(state.psi.size());
  const int n_params = state.n_params();

  // predict
  state.psi = transition * state.psi;
  MatX p_pred = transition * state.cov * transition.transpose() + process_noise;
  p_pred = ((p_pred + p_pred.transpose()) / 2.0).eval();

  const MeasurementModel mm = model(state.psi.head(n_params));
  const int m_rx = static_cast<int>(noise_block.rows());
  const int n_blocks = static_cast<int>(observation.size()) / m_rx;
  if (mm.prediction.size() != observation.size()) {
    throw std::invalid_argument("ekf_step: observation dimension mismatch");
  }

  // regularize the combined-noise block if it is not safely invertible
  CMat block = noise_block;
  Eigen::LLT<CMat> llt(block);
  const double tr = block.real().trace();
  if (llt.info() != Eigen::Success || !(tr > 0.0)) {
    const double scale = observation.squaredNorm() / std::max<int>(1, observation.size());
    const double jitter = 1e-12 * std::max(tr / m_rx, std::max(scale, 1e-30));
    block += jitter * CMat::Identity(m_rx, m_rx);
    llt.compute(block);
    result.jitter_applied = true;
  }

  // information-form update over the stacked real/imag observation: the
  // stacked quantities reduce to 2*Re(J^H C^-1 J) and 2*Re(J^H C^-1 nu)
  const CVec nu = observation - mm.prediction;
  MatX info = MatX::Zero(dim, dim);
  VecX iv = VecX::Zero(dim);
  double nis_white = 0.0;
  for (int n = 0; n < n_blocks; ++n) {
    const CMat jn = mm.jacobian.middleRows(n * m_rx, m_rx);
    const CVec nun = nu.segment(n * m_rx, m_rx);
    const CMat cj = llt.solve(jn);
    const CVec cn = llt.solve(nun);
    info.topLeftCorner(n_params, n_params) += 2.0 * (jn.adjoint() * cj).real();
    iv.head(n_params) += 2.0 * (jn.adjoint() * cn).real();
    nis_white += 2.0 * (nun.adjoint() * cn)(0).real();
  }

  Eigen::LDLT<MatX> p_ldlt(p_pred);
  MatX p_pred_inv;
  if (p_ldlt.info() == Eigen::Success && p_ldlt.isPositive()) {
    p_pred_inv = p_ldlt.solve(MatX::Identity(dim, dim));
  } else {
    result.jitter_applied = true;
    p_pred_inv = (p_pred + 1e-12 * MatX::Identity(dim, dim)).inverse();
  }
  const MatX p_post = (p_pred_inv + info).inverse();

  state.psi += p_post * iv;
  result.nis = nis_white - iv.dot(p_post * iv);

  // Joseph form via K = P+ H^T R^-1: (I-KH) P- (I-KH)^T + K R K^T,
  // with KH = P+ * info and K R K^T = P+ * info * P+.
  const MatX a = MatX::Identity(dim, dim) - p_post * info;
  state.cov = a * p_pred * a.transpose() + p_post * info * p_post;
  symmetrize_floor(state.cov);
  state.block_index += 1;
  return result;
}

}  // namespace lenstrack
