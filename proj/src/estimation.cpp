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

#include "lenstrack/estimation.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lenstrack {

namespace {

std::vector<int> all_subcarriers(int n) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

double total_energy(const std::vector<CVec>& r, const std::vector<int>& subcarriers) {
  double e = 0.0;
  for (int n : subcarriers) e += r[n].squaredNorm();
  return e;
}

// AOA from the beamspace peak index through the arcsin grid.
double index_to_angle(const ArrayConfig& array, int peak) {
  double s = array.wavelength / array.spacing * array.sym_index(peak) / array.n_elements;
  s = std::clamp(s, -1.0, 1.0);
  return std::asin(s);
}

// argmax over beam indices of sum_n |A[:,m]^H r[n]| / ||A[:,m]||, where
// A = Omega^H; column m of A is the conjugated m-th row of Omega. Ties go
// to the lowest index. `skip` masks already-claimed indices (CS baseline).
int select_peak(const std::vector<CVec>& r, const std::vector<CMat>& ops,
                const std::vector<int>& subcarriers, const std::vector<bool>& skip,
                std::uint64_t& op_count) {
  const int n_beams = static_cast<int>(ops.front().cols());
  int best = -1;
  double best_metric = -1.0;
  for (int m = 0; m < n_beams; ++m) {
    if (!skip.empty() && skip[m]) continue;
    double metric = 0.0;
    for (std::size_t j = 0; j < subcarriers.size(); ++j) {
      const auto& op = ops[j];
      const double col_norm = op.col(m).norm();
      metric += std::abs((op.col(m).adjoint() * r[subcarriers[j]])(0)) / col_norm;
    }
    if (metric > best_metric) {
      best_metric = metric;
      best = m;
    }
  }
  op_count += static_cast<std::uint64_t>(n_beams) * subcarriers.size() *
              ops.front().rows();
  return best;
}

}  // namespace

double cfar_threshold(int n_samples, int n_ant, double p_fa, double noise_psd) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) {
    throw std::invalid_argument("cfar_threshold: p_fa must lie in (0, 1)");
  }
  const double q = std::pow(1.0 - p_fa, 1.0 / n_ant);
  return noise_psd * gsl_cdf_gamma_Pinv(q, static_cast<double>(n_samples), 1.0);
}

std::vector<int> support_window(int peak, int v, int n) {
  if (v < 1 || v > n) throw std::invalid_argument("support_window: bad v");
  const int lo = (v % 2 == 0) ? peak - v / 2 : peak - (v - 1) / 2;
  std::vector<int> out(v);
  for (int i = 0; i < v; ++i) out[i] = ((lo + i) % n + n) % n;
  return out;
}

namespace {

// Shared sparse-recovery loop. When grow_support is false each iteration
// solves on its own v-element window and subtracts (SD); when true the
// support accumulates one index per iteration with a joint LS (CS/OMP).
TrainingResult sparse_recover(const std::vector<CVec>& y, const SensingMatrix& sensing,
                              const ArrayConfig& array, int v, double delta, int max_paths,
                              const std::vector<int>& subcarriers, bool grow_support) {
  const int n_beams = sensing.n_antennas();
  const int g = sensing.n_beams();

  std::vector<CMat> ops(subcarriers.size());
  for (std::size_t j = 0; j < subcarriers.size(); ++j) {
    ops[j] = sensing.operator_matrix(subcarriers[j]);
  }

  TrainingResult result;
  result.subcarriers = subcarriers;
  std::vector<CVec> r = y;
  double energy = total_energy(r, subcarriers);
  result.residual_history.push_back(energy);

  // r_0 - r_{-1} = y: the first stopping test gates on the raw energy.
  double last_change = energy;
  std::vector<int> accumulated;
  std::vector<bool> used(n_beams, false);

  while (last_change > delta && static_cast<int>(result.paths.size()) < max_paths) {
    const int peak = select_peak(r, ops, subcarriers,
                                 grow_support ? used : std::vector<bool>{},
                                 result.dominant_ops);
    if (peak < 0) break;

    DetectedPath path;
    path.peak_index = peak;
    path.aoa = index_to_angle(array, peak);
    if (grow_support) {
      used[peak] = true;
      accumulated.push_back(peak);
      path.support = {peak};
    } else {
      path.support = support_window(peak, v, n_beams);
    }
    const std::vector<int>& solve_support = grow_support ? accumulated : path.support;
    const int s = static_cast<int>(solve_support.size());

    result.pre_residuals.push_back(r);
    const double before = total_energy(r, subcarriers);
    path.coeffs = CMat::Zero(s, sensing.n_subcarriers());
    for (std::size_t j = 0; j < subcarriers.size(); ++j) {
      const int n = subcarriers[j];
      CMat restricted(g, s);
      for (int c = 0; c < s; ++c) restricted.col(c) = ops[j].col(solve_support[c]);
      const CVec target = grow_support ? y[n] : r[n];
      const CVec coeff = restricted.completeOrthogonalDecomposition().solve(target);
      path.coeffs.col(n) = coeff;
      r[n] = target - restricted * coeff;
      result.dominant_ops += static_cast<std::uint64_t>(g) * s * (s + 2);
    }
    const double after = total_energy(r, subcarriers);
    path.energy = std::max(before - after, 0.0);
    last_change = before - after;

    if (grow_support) {
      // per-path coefficient rows of the joint solve, one row per index
      CMat joint = path.coeffs;
      path.coeffs = joint.row(s - 1);
      // refresh earlier paths' single-row coefficients with the joint values
      for (int p = 0; p < s - 1; ++p) result.paths[p].coeffs = joint.row(p);
    }

    result.paths.push_back(std::move(path));
    result.residual_history.push_back(after);
  }

  result.stopped_immediately = result.paths.empty();
  // detection order already trends strongest-first; make descending energy
  // explicit and deterministic
  std::vector<std::size_t> order(result.paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.paths[a].energy > result.paths[b].energy;
  });
  std::vector<DetectedPath> sorted_paths;
  std::vector<std::vector<CVec>> sorted_res;
  sorted_paths.reserve(order.size());
  for (std::size_t i : order) {
    sorted_paths.push_back(std::move(result.paths[i]));
    sorted_res.push_back(std::move(result.pre_residuals[i]));
  }
  result.paths = std::move(sorted_paths);
  result.pre_residuals = std::move(sorted_res);
  return result;
}

}  // namespace

TrainingResult sd_estimate(const std::vector<CVec>& y, const SensingMatrix& sensing,
                           const ArrayConfig& array, int v, double delta, int max_paths,
                           const std::vector<int>& subcarriers) {
  return sparse_recover(y, sensing, array, v, delta, max_paths, subcarriers, false);
}

TrainingResult sd_estimate_downlink(const std::vector<CVec>& y, const SensingMatrix& sensing,
                                    const ArrayConfig& array, int v, double delta,
                                    int max_paths) {
  return sd_estimate(y, sensing, array, v, delta, max_paths,
                     all_subcarriers(static_cast<int>(y.size())));
}

TrainingResult sd_estimate_uplink(const std::vector<CVec>& y, const SensingMatrix& sensing,
                                  const ArrayConfig& array, int v, double delta,
                                  int max_paths, const std::vector<int>& subcarriers) {
  return sd_estimate(y, sensing, array, v, delta, max_paths, subcarriers);
}

TrainingResult cs_baseline_estimate(const std::vector<CVec>& y, const SensingMatrix& sensing,
                                    const ArrayConfig& array, int v, double delta,
                                    int max_paths) {
  (void)v;  // reported only; the CS support grows one index per iteration
  return sparse_recover(y, sensing, array, 1, delta, max_paths,
                        all_subcarriers(static_cast<int>(y.size())), true);
}

void estimate_delay_gain(TrainingResult& result, const ArrayConfig& array,
                         int peer_elements, const OfdmConfig& ofdm, int grid_points,
                         bool parabolic) {
  const int n_sub = ofdm.n_subcarriers;
  const double t_symbol = n_sub * ofdm.sample_period();
  const double grid_step = ofdm.cp_duration() / grid_points;
  const double scale = std::sqrt(static_cast<double>(peer_elements));

  for (auto& path : result.paths) {
    if (path.support.empty()) {
      throw std::invalid_argument("estimate_delay_gain: empty support");
    }
    // aggregate the restricted coefficients onto the kernel pattern at the
    // estimated angle; on-grid single paths collapse to the exact gamma_n
    const VecX chi = chi_vector(array, path.aoa);
    VecX w(path.support.size());
    for (std::size_t i = 0; i < path.support.size(); ++i) w(i) = chi(path.support[i]);
    const double w_norm = w.norm();
    if (w_norm > 0.0) w /= w_norm;

    CVec c(n_sub);
    for (int n = 0; n < n_sub; ++n) {
      c(n) = (w.cast<Complex>().transpose() * path.coeffs.col(n))(0);
    }

    auto metric = [&](double tau) {
      Complex acc{0.0, 0.0};
      for (int n : result.subcarriers) {
        acc += c(n) * std::polar(1.0, 2.0 * kPi * n * tau / t_symbol);
      }
      return std::abs(acc);
    };

    int best_i = 0;
    double best_m = -1.0;
    std::vector<double> grid_metric(grid_points);
    for (int i = 0; i < grid_points; ++i) {
      grid_metric[i] = metric(i * grid_step);
      if (grid_metric[i] > best_m) {
        best_m = grid_metric[i];
        best_i = i;
      }
    }
    double tau_hat = best_i * grid_step;
    if (parabolic && best_i > 0 && best_i + 1 < grid_points) {
      const double ym = grid_metric[best_i - 1];
      const double y0 = grid_metric[best_i];
      const double yp = grid_metric[best_i + 1];
      const double denom = ym - 2.0 * y0 + yp;
      if (std::abs(denom) > 1e-30) {
        const double shift = 0.5 * (ym - yp) / denom;
        if (std::abs(shift) <= 1.0) tau_hat += shift * grid_step;
      }
    }
    path.toa = tau_hat;

    // scalar LS for the gain on the matched template
    Complex num{0.0, 0.0};
    double den = 0.0;
    for (int n : result.subcarriers) {
      const Complex g = scale * w_norm * std::polar(1.0, -2.0 * kPi * n * tau_hat / t_symbol);
      num += std::conj(g) * c(n);
      den += std::norm(g);
    }
    path.gain = den > 0.0 ? num / den : Complex{0.0, 0.0};
  }
}

double angular_refine(double coarse_angle, const std::vector<CVec>& residual,
                      const SensingMatrix& sensing, const ArrayConfig& array,
                      double window, int grid_points,
                      const std::vector<int>& subcarriers) {
  std::vector<CMat> ops(subcarriers.size());
  for (std::size_t j = 0; j < subcarriers.size(); ++j) {
    ops[j] = sensing.operator_matrix(subcarriers[j]);
  }
  auto metric = [&](double angle) {
    const CVec t0 = chi_vector(array, angle).cast<Complex>();
    double m = 0.0;
    for (std::size_t j = 0; j < subcarriers.size(); ++j) {
      const CVec t = ops[j] * t0;
      const double norm = t.norm();
      if (norm > 0.0) m += std::abs((t.adjoint() * residual[subcarriers[j]])(0)) / norm;
    }
    return m;
  };

  double best_angle = coarse_angle;
  double best_metric = metric(coarse_angle);
  for (int i = 0; i <= grid_points; ++i) {
    const double a = coarse_angle - window / 2.0 + window * i / grid_points;
    const double m = metric(a);
    if (m > best_metric) {
      best_metric = m;
      best_angle = a;
    }
  }
  return best_angle;
}

}  // namespace lenstrack
