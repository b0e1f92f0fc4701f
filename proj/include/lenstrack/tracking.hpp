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

#ifndef LENSTRACK_TRACKING_HPP
#define LENSTRACK_TRACKING_HPP

#include <functional>
#include <utility>

#include "lenstrack/beamforming.hpp"
#include "lenstrack/signaling.hpp"
#include "lenstrack/types.hpp"

namespace lenstrack {

// Continuous-time process noise spreads. cross_corr is carried through the
// configuration but not used: the process covariance is diagonal per
// parameter in this model.
struct ProcessNoiseConfig {
  double sigma_tau = 0.0;    // s / sqrt(s^3) units of the CWNA model
  double sigma_theta = 0.0;  // rad
  double sigma_phi = 0.0;    // rad
  double cross_corr = 0.0;
};

// Filter state [parameters; rates] with covariance. The uplink filter runs
// over [tau0, theta0, rates] at the BS, the downlink filter over
// [phi0, rate] at the MS; angle states are kept unwrapped.
struct TrackState {
  VecX psi;
  MatX cov;
  int block_index = 0;
  double t_b = 0.0;

  int n_params() const { return static_cast<int>(psi.size()) / 2; }
};

// Block transition [[I, T_B*I], [0, I]] of the given (even) dimension.
MatX make_transition(int dim, double t_b);

// CWNA discretization, block entries sigma^2 * [T^3/3, T^2/2; T^2/2, T]
// assembled into [params; rates] ordering.
MatX discretize_process_noise(const VecX& sigmas, double t_b);

struct LosParamEstimate {
  double tau = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct InitUncertainty {
  double tau_var = 0.0;
  double theta_var = 0.0;
  double phi_var = 0.0;
  // rate variance = rate_scale * param variance / T_B^2 (difference of two
  // independent estimates doubles the variance)
  double rate_scale = 2.0;
};

// Initializes the two filters from two consecutive training estimates one
// block apart: parameters from the second, rates from the (wrapped)
// difference quotients.
std::pair<TrackState, TrackState> init_state(const LosParamEstimate& first,
                                             const LosParamEstimate& second, double t_b,
                                             const InitUncertainty& unc);

struct MeasurementModel {
  CVec prediction;  // length N * M_rx
  CMat jacobian;    // complex, (N * M_rx) x n_tracked_params
};

// Everything the LOS-only measurement prediction needs besides the tracked
// parameters.
struct TrackingLink {
  LinkDirection direction = LinkDirection::Uplink;
  Beamformer tx;
  Beamformer rx;
  PilotBlock pilots;
  ArrayConfig bs;
  ArrayConfig ms;
  OfdmConfig ofdm;
  Complex gain{1.0, 0.0};    // h0 for the prediction, re-estimated per block
  double fixed_phi = 0.0;    // uplink: MS-side angle from the downlink filter
  double fixed_tau = 0.0;    // downlink: delay from the uplink filter
  double fixed_theta = 0.0;  // downlink: BS-side angle from the uplink filter
};

// Predicted LOS observation and its analytic Jacobian w.r.t. the tracked
// parameters (uplink: [tau, theta]; downlink: [phi]).
MeasurementModel measurement_model(const VecX& tracked_params, const TrackingLink& link);

// Scalar LS for the nuisance channel gain given a unit-gain template.
Complex estimate_gain(const CVec& observation, const CVec& unit_gain_template);

struct EkfStepResult {
  bool jitter_applied = false;
  double nis = 0.0;  // normalized innovation squared (stacked-real dimension)
};

// One predict + update. The complex observation is handled by stacking real
// and imaginary parts; the update is evaluated in information form with a
// Joseph-form covariance rebuild, and the covariance is re-symmetrized with
// a PSD floor. noise_block is the per-subcarrier M x M combined-noise
// covariance (replicated over subcarriers); a singular block is regularized
// with diagonal jitter and flagged.
EkfStepResult ekf_step(TrackState& state, const CVec& observation, const CMat& noise_block,
                       const std::function<MeasurementModel(const VecX&)>& model,
                       const MatX& transition, const MatX& process_noise);

}  // namespace lenstrack

#endif  // LENSTRACK_TRACKING_HPP
