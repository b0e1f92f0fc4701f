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

#ifndef LENSTRACK_HARNESS_HPP
#define LENSTRACK_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lenstrack/estimation.hpp"
#include "lenstrack/localization.hpp"
#include "lenstrack/scene.hpp"
#include "lenstrack/signaling.hpp"
#include "lenstrack/tracking.hpp"

namespace lenstrack {

// Nominal constant rates of the true LOS parameters, per second.
struct TrajectoryConfig {
  double tau_rate = 0.0;    // s/s
  double theta_rate = 0.0;  // rad/s
  double phi_rate = 0.0;    // rad/s
};

struct ExperimentConfig {
  Scene scene;
  SceneModelConfig scene_model;
  int n_bs = 32;
  int n_ms = 32;
  OfdmConfig ofdm{40, 200e6, 8, 60e9};
  TrainingConfig training;
  ProcessNoiseConfig process_noise{0.5e-9, 5.0 * kPi / 180.0, 5.0 * kPi / 180.0, 0.0};
  TrajectoryConfig trajectory;
  double sigma_max_theta = 20.0 * kPi / 180.0;
  double sigma_max_phi = 20.0 * kPi / 180.0;
  double t_b = 0.01;   // s
  double t_ob = 0.6;   // s
  std::vector<double> snr_sweep{-10.0, -5.0, 0.0, 5.0, 10.0};
  int n_trials = 100;
  std::uint64_t rng_seed = 24601;

  bool refine = false;       // angular refinement after training
  int refine_grid = 64;
  int delay_grid_points = 0; // 0 -> 16 * N
  int n_sub_uplink = 4;      // subcarriers used by the uplink estimator
  bool one_bit_rx = true;    // 1-bit hybrid receive banks during tracking
  int rx_beam_margin = 1;    // extra receive beams beyond the minimum count
  double nlos_noise_inflation_db = 3.0;
  bool recenter_rx_per_block = true;
  double init_var_scale = 1.0;  // scales the training-uncertainty prior
  bool process_noise_on_truth = true;
  int n_threads = 0;         // 0 = hardware concurrency

  int blocks() const { return static_cast<int>(t_ob / t_b); }
  int delay_points() const {
    return delay_grid_points > 0 ? delay_grid_points : 16 * ofdm.n_subcarriers;
  }
};

// One full training shot (downlink + uplink) against the given paths.
struct TrainingOutcome {
  TrainingResult downlink;
  TrainingResult uplink;
  bool failed = false;       // no path detected on either link
  bool count_mismatch = false;
  LosParamEstimate los;      // strongest-path parameters
  double noise_psd = 0.0;
};

TrainingOutcome run_training(const ExperimentConfig& cfg, const std::vector<PathParams>& paths,
                             double snr_db, double noise_psd_override, std::uint64_t seed);

struct TrialResult {
  bool failed = false;
  std::vector<double> pos_err;   // per block, meters
  std::vector<double> rot_err;   // per block, radians
  std::vector<double> nis_ul;
  std::vector<double> nis_dl;
};

// Heuristic training-tracking pipeline: two training blocks initialize the
// dual EKFs, then per block the UL transmit beams are designed from the
// previous downlink posterior, the BS tracks (tau, theta) and the position,
// the DL transmit beams from the previous uplink posterior, and the MS
// tracks phi and the rotation angle.
TrialResult run_training_tracking(const ExperimentConfig& cfg, double snr_db,
                                  std::uint64_t trial_seed);

struct MetricsRecord {
  std::vector<double> rmse_pos;     // per block, meters
  std::vector<double> rmse_rot;     // per block, radians
  std::vector<double> median_pos;   // per block
  std::vector<double> median_rot;
  double rmse_max_pos = 0.0;
  double rmse_max_rot = 0.0;
  double mean_nis_ul = 0.0;
  double mean_nis_dl = 0.0;
  int n_trials = 0;
  int n_failed = 0;
};

MetricsRecord aggregate_trials(const std::vector<TrialResult>& trials);

// Parallel Monte Carlo over trials with derived per-trial seeds.
MetricsRecord monte_carlo_tracking(const ExperimentConfig& cfg, double snr_db);

// Training-only paired comparison of the support-detection estimator with
// the conventional CS baseline on identical received signals.
struct TrainingCompareRecord {
  double snr_db = 0.0;
  int v = 0;
  double median_residual_sd = 0.0;  // reconstruction NMSE of the beamspace vector
  double median_residual_cs = 0.0;
  double median_ratio_cs_over_sd = 0.0;
  double detect_sd = 0.0;           // P(true dominant beam in first support)
  double detect_cs = 0.0;
  double mean_iterations_sd = 0.0;
  double mean_iterations_cs = 0.0;
  int n_trials = 0;
};

TrainingCompareRecord training_compare(const ExperimentConfig& cfg, double snr_db, int v);

// Closed-form training and tracking time accounting.
struct TrainingTimeReport {
  double proposed = 0.0;     // 2 * G * T_s
  double exhaustive = 0.0;   // T_s * N_BS * N_MS
  double hierarchical = 0.0; // T_s * M_G (K+1)^2 ceil(M_G (K+1)/N_RF) log_{M_G}(N_G/(K+1))
  double tracking = 0.0;     // 2 * T_s
};

TrainingTimeReport training_time_report(int n_bs, int n_ms, int g, double t_s, int m_g,
                                        int n_g, int n_rf, int k_hat);

// Block-duration rule of thumb d0 / (v_max * N_BS); never applied implicitly.
double suggested_block_duration(double d0, double v_max, int n_bs);

// Full sweep over configured SNR points; writes results.csv, summary.csv and
// config_echo.json under out_dir.
void monte_carlo_sweep(const ExperimentConfig& cfg, const std::string& out_dir);

// Training comparison sweep (SD vs CS); writes train_compare.csv.
void training_compare_sweep(const ExperimentConfig& cfg, const std::vector<int>& v_values,
                            const std::string& out_dir);

}  // namespace lenstrack

#endif  // LENSTRACK_HARNESS_HPP
