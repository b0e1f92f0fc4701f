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

#ifndef LENSTRACK_ESTIMATION_HPP
#define LENSTRACK_ESTIMATION_HPP

#include <cstdint>
#include <vector>

#include "lenstrack/channel.hpp"
#include "lenstrack/signaling.hpp"
#include "lenstrack/types.hpp"

namespace lenstrack {

struct DetectedPath {
  int peak_index = -1;        // 0-based beamspace index of the detection peak
  double aoa = 0.0;           // radians; refined in place when refinement runs
  std::vector<int> support;   // beamspace indices, 0-based, wrap-aware
  CMat coeffs;                // |support| x N restricted LS coefficients
  double energy = 0.0;        // signal energy removed by this extraction
  double toa = 0.0;           // filled by estimate_delay_gain
  Complex gain{0.0, 0.0};     // filled by estimate_delay_gain
};

// Output of one sparse-recovery run. Paths are ordered by descending
// removed energy; k_hat() + 1 equals the number of completed extraction
// iterations (the stopping test detects a below-threshold extraction one
// iteration after it happened, so the last path may be noise-level).
struct TrainingResult {
  std::vector<DetectedPath> paths;
  std::vector<double> residual_history;  // residual energy, initial + per iteration
  // Residual snapshots taken before each path's extraction, for refinement.
  std::vector<std::vector<CVec>> pre_residuals;
  bool stopped_immediately = false;
  std::uint64_t dominant_ops = 0;  // counted complex MACs of the hot loops
  std::vector<int> subcarriers;    // subcarrier indices the run operated on

  int iterations() const { return static_cast<int>(paths.size()); }
  int k_hat() const { return static_cast<int>(paths.size()) - 1; }
};

// CFAR stopping level: noise_psd * Pinv(n_samples, (1 - p_fa)^(1/n_ant)),
// with Pinv the inverse regularized lower incomplete gamma in its second
// argument. noise_psd is the per-sample variance of the aggregated
// statistic. Throws unless 0 < p_fa < 1.
double cfar_threshold(int n_samples, int n_ant, double p_fa, double noise_psd);

// Support window of v indices around (and containing) the peak, modulo n:
// even v -> {peak - v/2, ..., peak + v/2 - 1},
// odd v  -> {peak - (v-1)/2, ..., peak + (v-1)/2}.
std::vector<int> support_window(int peak, int v, int n);

// Extended support-detection estimation: iteratively picks the beam index
// maximizing the normalized correlation metric, maps it to an AOA through
// the arcsin grid, solves restricted LS on the v-element support, and
// subtracts; stops when the energy removed by the last extraction falls
// to delta or the iteration cap is reached.
TrainingResult sd_estimate(const std::vector<CVec>& y, const SensingMatrix& sensing,
                           const ArrayConfig& array, int v, double delta, int max_paths,
                           const std::vector<int>& subcarriers);

// Full-band downlink wrapper.
TrainingResult sd_estimate_downlink(const std::vector<CVec>& y, const SensingMatrix& sensing,
                                    const ArrayConfig& array, int v, double delta,
                                    int max_paths);

// Uplink wrapper over a configured subcarrier subset.
TrainingResult sd_estimate_uplink(const std::vector<CVec>& y, const SensingMatrix& sensing,
                                  const ArrayConfig& array, int v, double delta,
                                  int max_paths, const std::vector<int>& subcarriers);

// Conventional CS baseline (OMP): one index per iteration, joint LS over the
// accumulated support, same stopping rule. v is accepted for reporting only.
TrainingResult cs_baseline_estimate(const std::vector<CVec>& y, const SensingMatrix& sensing,
                                    const ArrayConfig& array, int v, double delta,
                                    int max_paths);

// Matched-filter TOA over a delay grid of grid_points samples spanning
// [0, T_CP), then scalar LS for the complex gain; optional parabolic
// interpolation around the grid peak. peer_elements is the element count of
// the transmitting side (the sqrt(N) splitter factor in the coefficients).
void estimate_delay_gain(TrainingResult& result, const ArrayConfig& array,
                         int peer_elements, const OfdmConfig& ofdm, int grid_points,
                         bool parabolic = true);

// Local dictionary grid search around coarse_angle (window no wider than one
// coarse grid cell); returns the metric argmax over grid_points candidates
// plus the coarse angle itself, so the result is never worse than coarse.
double angular_refine(double coarse_angle, const std::vector<CVec>& residual,
                      const SensingMatrix& sensing, const ArrayConfig& array,
                      double window, int grid_points,
                      const std::vector<int>& subcarriers);

}  // namespace lenstrack

#endif  // LENSTRACK_ESTIMATION_HPP
