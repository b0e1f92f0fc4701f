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

#include "lenstrack/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "lenstrack/beamforming.hpp"
#include "lenstrack/config_io.hpp"

namespace lenstrack {

namespace {

constexpr std::uint64_t kTagScene = 0x5343454eULL;
constexpr std::uint64_t kTagTrainDl = 0x5452444cULL;
constexpr std::uint64_t kTagTrainUl = 0x5452554cULL;
constexpr std::uint64_t kTagNoise = 0x4e4f4953ULL;
constexpr std::uint64_t kTagTruth = 0x54525554ULL;
constexpr std::uint64_t kTagGain = 0x4741494eULL;

ArrayConfig bs_array(const ExperimentConfig& cfg) {
  return ArrayConfig::half_wavelength(cfg.n_bs, cfg.ofdm.wavelength());
}

ArrayConfig ms_array(const ExperimentConfig& cfg) {
  return ArrayConfig::half_wavelength(cfg.n_ms, cfg.ofdm.wavelength());
}

std::vector<int> uplink_subcarriers(const ExperimentConfig& cfg) {
  const int n_sub = std::min(std::max(cfg.n_sub_uplink, 1), cfg.ofdm.n_subcarriers);
  std::vector<int> idx(n_sub);
  for (int j = 0; j < n_sub; ++j) idx[j] = j * cfg.ofdm.n_subcarriers / n_sub;
  return idx;
}

// Stopping threshold for a recovery over `subcarrier_count` subcarriers of a
// G-dimensional signal: the first-iteration statistic aggregates
// subcarrier_count * G complex samples of per-entry variance N0 * N_ant^2.
double stopping_threshold(const ExperimentConfig& cfg, int n_ant, int subcarrier_count,
                          double noise_psd, double signal_energy) {
  if (noise_psd <= 0.0) return 1e-12 * signal_energy;
  const double per_entry = noise_psd * n_ant * n_ant;
  return cfar_threshold(subcarrier_count * cfg.training.g_beams, n_ant,
                        cfg.training.p_fa, per_entry);
}

double total_energy(const std::vector<CVec>& y) {
  double e = 0.0;
  for (const auto& v : y) e += v.squaredNorm();
  return e;
}

void refine_result(TrainingResult& result, const SensingMatrix& sensing,
                   const ArrayConfig& array, int grid) {
  for (std::size_t k = 0; k < result.paths.size(); ++k) {
    auto& path = result.paths[k];
    const double window = array.grid_cell_width(path.aoa);
    path.aoa = angular_refine(path.aoa, result.pre_residuals[k], sensing, array, window,
                              grid, result.subcarriers);
  }
}

struct LosTruth {
  double tau = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double tau_rate = 0.0;
  double theta_rate = 0.0;
  double phi_rate = 0.0;
};

// One CWNA block step of the true LOS parameters; rates random-walk and the
// parameters integrate them, matching the filter's process model.
void truth_step(LosTruth& t, const ProcessNoiseConfig& pn, double t_b, bool with_noise,
                Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  auto step_pair = [&](double& x, double& rate, double sigma) {
    x += t_b * rate;
    if (with_noise && sigma > 0.0) {
      const double l11 = sigma * std::sqrt(t_b * t_b * t_b / 3.0);
      const double l21 = sigma * std::sqrt(3.0 * t_b) / 2.0;
      const double l22 = sigma * std::sqrt(t_b) / 2.0;
      const double z1 = n01(rng);
      const double z2 = n01(rng);
      x += l11 * z1;
      rate += l21 * z1 + l22 * z2;
    }
  };
  step_pair(t.tau, t.tau_rate, pn.sigma_tau);
  step_pair(t.theta, t.theta_rate, pn.sigma_theta);
  step_pair(t.phi, t.phi_rate, pn.sigma_phi);
}

// Refresh the LOS entry of the path list from the true parameters; the gain
// magnitude follows the Friis loss at the current range, the phase is
// re-drawn per block (blocks are far apart relative to the carrier period).
void refresh_los_path(std::vector<PathParams>& paths, const LosTruth& t,
                      const ExperimentConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  PathParams& los = paths[0];
  los.tau = t.tau;
  los.theta = wrap_pm_pi(t.theta);
  los.phi = wrap_pm_pi(t.phi);
  const double dist = std::max(t.tau * kSpeedOfLight, 1e-3);
  los.path_loss = path_loss(dist, PathKind::Los, cfg.ofdm.wavelength());
  los.gain = std::polar(std::sqrt(cfg.n_bs * cfg.n_ms / los.path_loss), phase(rng));
}

int beams_for_uncertainty(double var, double sigma_max, const ArrayConfig& array) {
  const double spread =
      std::clamp(6.0 * std::sqrt(std::max(var, 0.0)), delta_phi_3db(array), sigma_max);
  return min_beam_count(spread, array.n_elements);
}

Beamformer build_rx_bank(double center, double sigma_max, const ArrayConfig& array,
                         const CMat& lens, const ExperimentConfig& cfg) {
  const int m_rx = min_beam_count(sigma_max, array.n_elements) + cfg.rx_beam_margin;
  Beamformer bank = heuristic_beamformer(center, m_rx, array);
  return hybrid_decompose(bank, lens, m_rx, cfg.one_bit_rx);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

}  // namespace

TrainingOutcome run_training(const ExperimentConfig& cfg, const std::vector<PathParams>& paths,
                             double snr_db, double noise_psd_override, std::uint64_t seed) {
  const ArrayConfig bs = bs_array(cfg);
  const ArrayConfig ms = ms_array(cfg);
  TrainingOutcome out;

  // downlink: MS estimates phi, tau, gains
  Rng rng_dl(mix_seed(seed, kTagTrainDl));
  Rng rng_noise_dl(mix_seed(seed, kTagTrainDl, kTagNoise));
  const auto h_ms = sparse_beamspace_vector(paths, ms, bs, cfg.ofdm, ArraySide::Ms);
  const SensingMatrix sensing_ms = make_sensing_matrix(cfg.n_ms, cfg.training, cfg.ofdm, rng_dl);
  double noise_psd = noise_psd_override;
  if (noise_psd < 0.0) {
    noise_psd = cfg.training.snr_db ? noise_psd_for_snr(*cfg.training.snr_db, sensing_ms, h_ms)
                                    : noise_psd_for_snr(snr_db, sensing_ms, h_ms);
  }
  out.noise_psd = noise_psd;
  const auto y_dl = synthesize_training_rx(h_ms, sensing_ms, noise_psd, rng_noise_dl);
  const double delta_dl =
      stopping_threshold(cfg, cfg.n_ms, cfg.ofdm.n_subcarriers, noise_psd, total_energy(y_dl));
  out.downlink = sd_estimate_downlink(y_dl, sensing_ms, ms, cfg.training.v_elements, delta_dl,
                                      cfg.training.max_paths);
  if (out.downlink.paths.empty()) {
    out.failed = true;
    return out;
  }
  if (cfg.refine) refine_result(out.downlink, sensing_ms, ms, cfg.refine_grid);
  estimate_delay_gain(out.downlink, ms, cfg.n_bs, cfg.ofdm, cfg.delay_points());

  // uplink: BS estimates theta over a subcarrier subset
  Rng rng_ul(mix_seed(seed, kTagTrainUl));
  Rng rng_noise_ul(mix_seed(seed, kTagTrainUl, kTagNoise));
  const auto h_bs = sparse_beamspace_vector(paths, bs, ms, cfg.ofdm, ArraySide::Bs);
  const SensingMatrix sensing_bs = make_sensing_matrix(cfg.n_bs, cfg.training, cfg.ofdm, rng_ul);
  const auto y_ul = synthesize_training_rx(h_bs, sensing_bs, noise_psd, rng_noise_ul);
  const auto ul_subs = uplink_subcarriers(cfg);
  const double delta_ul = stopping_threshold(cfg, cfg.n_bs, static_cast<int>(ul_subs.size()),
                                             noise_psd, total_energy(y_ul));
  out.uplink = sd_estimate_uplink(y_ul, sensing_bs, bs, cfg.training.v_elements, delta_ul,
                                  cfg.training.max_paths, ul_subs);
  if (out.uplink.paths.empty()) {
    out.failed = true;
    return out;
  }
  if (cfg.refine) refine_result(out.uplink, sensing_bs, bs, cfg.refine_grid);

  // pair by descending energy; mismatched counts keep the min
  out.count_mismatch = out.downlink.paths.size() != out.uplink.paths.size();
  out.los.tau = out.downlink.paths[0].toa;
  out.los.phi = out.downlink.paths[0].aoa;
  out.los.theta = out.uplink.paths[0].aoa;
  return out;
}

TrialResult run_training_tracking(const ExperimentConfig& cfg, double snr_db,
                                  std::uint64_t trial_seed) {
  const ArrayConfig bs = bs_array(cfg);
  const ArrayConfig ms = ms_array(cfg);
  const CMat lens_bs = lens_matrix(bs);
  const CMat lens_ms = lens_matrix(ms);
  const int n_blocks = cfg.blocks();

  TrialResult trial;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  trial.pos_err.assign(n_blocks, nan);
  trial.rot_err.assign(n_blocks, nan);
  trial.nis_ul.assign(n_blocks, nan);
  trial.nis_dl.assign(n_blocks, nan);

  const CarrierConfig carrier{cfg.ofdm.wavelength(), cfg.n_bs, cfg.n_ms};
  std::vector<PathParams> paths =
      generate_paths(cfg.scene, carrier, mix_seed(trial_seed, kTagScene), cfg.scene_model);

  LosTruth truth;
  truth.tau = paths[0].tau;
  truth.theta = paths[0].theta;
  truth.phi = paths[0].phi;
  truth.tau_rate = cfg.trajectory.tau_rate;
  truth.theta_rate = cfg.trajectory.theta_rate;
  truth.phi_rate = cfg.trajectory.phi_rate;

  Rng rng_truth(mix_seed(trial_seed, kTagTruth));
  Rng rng_gain(mix_seed(trial_seed, kTagGain));
  Rng rng_track_noise(mix_seed(trial_seed, kTagNoise, 1));

  auto true_pose = [&]() {
    const auto [p, a] = params_to_pose(cfg.scene.bs, truth.tau, truth.theta, truth.phi);
    return std::make_pair(p, a);
  };
  auto record_pose = [&](int block, const Vec2& p_hat, double alpha_hat) {
    const auto [p_true, a_true] = true_pose();
    trial.pos_err[block] = (p_hat - p_true).norm();
    trial.rot_err[block] = std::abs(angle_diff(alpha_hat, a_true));
  };

  // block 0: training
  const TrainingOutcome est0 =
      run_training(cfg, paths, snr_db, -1.0, mix_seed(trial_seed, 0));
  if (est0.failed) {
    trial.failed = true;
    return trial;
  }
  const double noise_psd = est0.noise_psd;
  {
    const auto [p0, a0] =
        params_to_pose(cfg.scene.bs, est0.los.tau, est0.los.theta, est0.los.phi);
    record_pose(0, p0, a0);
  }

  // block 1: second training shot for rate initialization
  truth_step(truth, cfg.process_noise, cfg.t_b, cfg.process_noise_on_truth, rng_truth);
  refresh_los_path(paths, truth, cfg, rng_gain);
  const TrainingOutcome est1 =
      run_training(cfg, paths, snr_db, noise_psd, mix_seed(trial_seed, 1));
  if (est1.failed) {
    trial.failed = true;
    return trial;
  }
  {
    const auto [p1, a1] =
        params_to_pose(cfg.scene.bs, est1.los.tau, est1.los.theta, est1.los.phi);
    record_pose(1, p1, a1);
  }

  // training-uncertainty prior: grid-quantization variances
  InitUncertainty unc;
  const double delay_step = cfg.ofdm.cp_duration() / cfg.delay_points();
  const double refine_gain = cfg.refine ? 16.0 : 1.0;
  unc.tau_var = cfg.init_var_scale * delay_step * delay_step / 12.0;
  const double cell_bs = bs.grid_cell_width(est1.los.theta);
  const double cell_ms = ms.grid_cell_width(est1.los.phi);
  unc.theta_var = cfg.init_var_scale * cell_bs * cell_bs / 12.0 / refine_gain;
  unc.phi_var = cfg.init_var_scale * cell_ms * cell_ms / 12.0 / refine_gain;

  auto [ul_state, dl_state] = init_state(est0.los, est1.los, cfg.t_b, unc);

  // receive banks; with re-centering enabled they follow the latest estimates
  Beamformer rx_bs = build_rx_bank(est1.los.theta, cfg.sigma_max_theta, bs, lens_bs, cfg);
  Beamformer rx_ms = build_rx_bank(est1.los.phi, cfg.sigma_max_phi, ms, lens_ms, cfg);

  const MatX phi_ul = make_transition(4, cfg.t_b);
  const MatX phi_dl = make_transition(2, cfg.t_b);
  VecX sig_ul(2), sig_dl(1);
  sig_ul << cfg.process_noise.sigma_tau, cfg.process_noise.sigma_theta;
  sig_dl << cfg.process_noise.sigma_phi;
  const MatX q_ul = discretize_process_noise(sig_ul, cfg.t_b);
  const MatX q_dl = discretize_process_noise(sig_dl, cfg.t_b);
  const double inflation =
      cfg.scene.scatterers.empty() ? 1.0 : std::pow(10.0, cfg.nlos_noise_inflation_db / 10.0);

  for (int m = 2; m < n_blocks; ++m) {
    truth_step(truth, cfg.process_noise, cfg.t_b, cfg.process_noise_on_truth, rng_truth);
    refresh_los_path(paths, truth, cfg, rng_gain);

    // previous-block posteriors drive all block-m beam designs
    const TrackState ul_prev = ul_state;
    const TrackState dl_prev = dl_state;
    if (cfg.recenter_rx_per_block && m > 2) {
      rx_bs = build_rx_bank(ul_prev.psi(1), cfg.sigma_max_theta, bs, lens_bs, cfg);
      rx_ms = build_rx_bank(dl_prev.psi(0), cfg.sigma_max_phi, ms, lens_ms, cfg);
    }

    // uplink: MS transmits toward the last downlink AOA, BS tracks (tau, theta)
    {
      const int m_tx = beams_for_uncertainty(dl_prev.cov(0, 0), cfg.sigma_max_phi, ms);
      const Beamformer tx_ms = heuristic_beamformer(dl_prev.psi(0), m_tx, ms);
      const PilotBlock pilots = PilotBlock::uniform(cfg.ofdm.n_subcarriers, m_tx);
      const CVec y_ul = synthesize_tracking_rx(paths, tx_ms, rx_bs, pilots, bs, ms, cfg.ofdm,
                                               noise_psd, LinkDirection::Uplink,
                                               rng_track_noise);
      TrackingLink link;
      link.direction = LinkDirection::Uplink;
      link.tx = tx_ms;
      link.rx = rx_bs;
      link.pilots = pilots;
      link.bs = bs;
      link.ms = ms;
      link.ofdm = cfg.ofdm;
      link.fixed_phi = dl_prev.psi(0) + cfg.t_b * dl_prev.psi(1);
      link.gain = Complex{1.0, 0.0};
      const VecX pred = (phi_ul * ul_state.psi).head(2);
      const CVec tmpl = measurement_model(pred, link).prediction;
      link.gain = estimate_gain(y_ul, tmpl);
      const CMat r_ul = inflation * tracking_noise_covariance(rx_bs, noise_psd);
      const auto step = ekf_step(
          ul_state, y_ul, r_ul,
          [&](const VecX& p) { return measurement_model(p, link); }, phi_ul, q_ul);
      trial.nis_ul[m] = step.nis;
    }
    const auto [p_hat, a_unused] =
        params_to_pose(cfg.scene.bs, ul_state.psi(0), ul_state.psi(1), 0.0);

    // downlink: BS transmits toward the last uplink AOA, MS tracks phi
    {
      const int m_tx = beams_for_uncertainty(ul_prev.cov(1, 1), cfg.sigma_max_theta, bs);
      const Beamformer tx_bs = heuristic_beamformer(ul_prev.psi(1), m_tx, bs);
      const PilotBlock pilots = PilotBlock::uniform(cfg.ofdm.n_subcarriers, m_tx);
      const CVec y_dl = synthesize_tracking_rx(paths, tx_bs, rx_ms, pilots, bs, ms, cfg.ofdm,
                                               noise_psd, LinkDirection::Downlink,
                                               rng_track_noise);
      TrackingLink link;
      link.direction = LinkDirection::Downlink;
      link.tx = tx_bs;
      link.rx = rx_ms;
      link.pilots = pilots;
      link.bs = bs;
      link.ms = ms;
      link.ofdm = cfg.ofdm;
      link.fixed_tau = ul_state.psi(0);
      link.fixed_theta = ul_state.psi(1);
      link.gain = Complex{1.0, 0.0};
      const VecX pred = (phi_dl * dl_state.psi).head(1);
      const CVec tmpl = measurement_model(pred, link).prediction;
      link.gain = estimate_gain(y_dl, tmpl);
      const CMat r_dl = inflation * tracking_noise_covariance(rx_ms, noise_psd);
      const auto step = ekf_step(
          dl_state, y_dl, r_dl,
          [&](const VecX& p) { return measurement_model(p, link); }, phi_dl, q_dl);
      trial.nis_dl[m] = step.nis;
    }

    const double alpha_hat = wrap_two_pi(kPi + ul_state.psi(1) - dl_state.psi(0));
    record_pose(m, p_hat, alpha_hat);
  }
  return trial;
}

MetricsRecord aggregate_trials(const std::vector<TrialResult>& trials) {
  MetricsRecord rec;
  rec.n_trials = static_cast<int>(trials.size());
  std::size_t n_blocks = 0;
  for (const auto& t : trials) {
    if (t.failed) {
      ++rec.n_failed;
    } else {
      n_blocks = std::max(n_blocks, t.pos_err.size());
    }
  }
  if (n_blocks == 0) return rec;
  rec.rmse_pos.assign(n_blocks, 0.0);
  rec.rmse_rot.assign(n_blocks, 0.0);
  rec.median_pos.assign(n_blocks, 0.0);
  rec.median_rot.assign(n_blocks, 0.0);

  double nis_ul_sum = 0.0, nis_dl_sum = 0.0;
  int nis_count = 0;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    double pos_sq = 0.0, rot_sq = 0.0;
    int count = 0;
    std::vector<double> pos_vals, rot_vals;
    for (const auto& t : trials) {
      if (t.failed || b >= t.pos_err.size() || std::isnan(t.pos_err[b])) continue;
      pos_sq += t.pos_err[b] * t.pos_err[b];
      rot_sq += t.rot_err[b] * t.rot_err[b];
      pos_vals.push_back(t.pos_err[b]);
      rot_vals.push_back(t.rot_err[b]);
      ++count;
      if (!std::isnan(t.nis_ul[b])) {
        nis_ul_sum += t.nis_ul[b];
        nis_dl_sum += t.nis_dl[b];
        ++nis_count;
      }
    }
    if (count > 0) {
      rec.rmse_pos[b] = std::sqrt(pos_sq / count);
      rec.rmse_rot[b] = std::sqrt(rot_sq / count);
      rec.median_pos[b] = quantile(pos_vals, 0.5);
      rec.median_rot[b] = quantile(rot_vals, 0.5);
    }
  }
  rec.rmse_max_pos = *std::max_element(rec.rmse_pos.begin(), rec.rmse_pos.end());
  rec.rmse_max_rot = *std::max_element(rec.rmse_rot.begin(), rec.rmse_rot.end());
  if (nis_count > 0) {
    rec.mean_nis_ul = nis_ul_sum / nis_count;
    rec.mean_nis_dl = nis_dl_sum / nis_count;
  }
  return rec;
}

namespace {

// Chunked trial-level parallelism; each trial owns a derived seed so the
// schedule cannot change the results.
template <typename Fn>
void parallel_trials(int n_trials, int n_threads, Fn&& body) {
  int hw = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
  hw = std::max(1, std::min(hw, n_trials));
  if (hw == 1) {
    for (int t = 0; t < n_trials; ++t) body(t);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(hw);
  for (int w = 0; w < hw; ++w) {
    pool.emplace_back([&, w]() {
      for (int t = w; t < n_trials; t += hw) body(t);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

MetricsRecord monte_carlo_tracking(const ExperimentConfig& cfg, double snr_db) {
  std::vector<TrialResult> trials(cfg.n_trials);
  parallel_trials(cfg.n_trials, cfg.n_threads, [&](int t) {
    trials[t] = run_training_tracking(cfg, snr_db, mix_seed(cfg.rng_seed, 0x545249ULL, t));
  });
  return aggregate_trials(trials);
}

TrainingCompareRecord training_compare(const ExperimentConfig& cfg, double snr_db, int v) {
  const ArrayConfig bs = bs_array(cfg);
  const ArrayConfig ms = ms_array(cfg);
  const CarrierConfig carrier{cfg.ofdm.wavelength(), cfg.n_bs, cfg.n_ms};

  struct PerTrial {
    double nmse_sd = 1.0, nmse_cs = 1.0;
    bool detect_sd = false, detect_cs = false;
    int iter_sd = 0, iter_cs = 0;
  };
  std::vector<PerTrial> rows(cfg.n_trials);

  parallel_trials(cfg.n_trials, cfg.n_threads, [&](int t) {
    const std::uint64_t seed = mix_seed(cfg.rng_seed, 0x434d50ULL, t);
    const auto paths = generate_paths(cfg.scene, carrier, mix_seed(seed, kTagScene),
                                      cfg.scene_model);
    const auto h_ms = sparse_beamspace_vector(paths, ms, bs, cfg.ofdm, ArraySide::Ms);
    Rng rng_sense(mix_seed(seed, kTagTrainDl));
    Rng rng_noise(mix_seed(seed, kTagTrainDl, kTagNoise));
    const SensingMatrix sensing = make_sensing_matrix(cfg.n_ms, cfg.training, cfg.ofdm,
                                                      rng_sense);
    const double noise_psd = noise_psd_for_snr(snr_db, sensing, h_ms);
    const auto y = synthesize_training_rx(h_ms, sensing, noise_psd, rng_noise);
    const double delta = stopping_threshold(cfg, cfg.n_ms, cfg.ofdm.n_subcarriers, noise_psd,
                                            total_energy(y));

    const TrainingResult sd = sd_estimate_downlink(y, sensing, ms, v, delta,
                                                   cfg.training.max_paths);
    const TrainingResult cs = cs_baseline_estimate(y, sensing, ms, v, delta,
                                                   cfg.training.max_paths);

    // reconstruction NMSE against the true sparse beamspace vector
    auto nmse = [&](const TrainingResult& r) {
      double err = 0.0, ref = 0.0;
      for (int n = 0; n < cfg.ofdm.n_subcarriers; ++n) {
        CVec rec = CVec::Zero(cfg.n_ms);
        for (const auto& p : r.paths) {
          for (std::size_t i = 0; i < p.support.size(); ++i) {
            rec(p.support[i]) += p.coeffs(static_cast<int>(i), n);
          }
        }
        err += (rec - h_ms[n]).squaredNorm();
        ref += h_ms[n].squaredNorm();
      }
      return ref > 0.0 ? err / ref : 1.0;
    };

    // dominant beam of the true (noiseless) beamspace vector
    VecX beam_energy = VecX::Zero(cfg.n_ms);
    for (const auto& hn : h_ms) beam_energy += hn.cwiseAbs2();
    int true_peak = 0;
    beam_energy.maxCoeff(&true_peak);
    auto detected = [&](const TrainingResult& r) {
      if (r.paths.empty()) return false;
      const auto& s = r.paths[0].support;
      return std::find(s.begin(), s.end(), true_peak) != s.end();
    };

    rows[t] = PerTrial{nmse(sd), nmse(cs), detected(sd), detected(cs), sd.iterations(),
                       cs.iterations()};
  });

  TrainingCompareRecord rec;
  rec.snr_db = snr_db;
  rec.v = v;
  rec.n_trials = cfg.n_trials;
  std::vector<double> nmse_sd, nmse_cs, ratio;
  for (const auto& r : rows) {
    nmse_sd.push_back(r.nmse_sd);
    nmse_cs.push_back(r.nmse_cs);
    ratio.push_back(r.nmse_sd > 0.0 ? r.nmse_cs / r.nmse_sd : 1.0);
    rec.detect_sd += r.detect_sd ? 1.0 : 0.0;
    rec.detect_cs += r.detect_cs ? 1.0 : 0.0;
    rec.mean_iterations_sd += r.iter_sd;
    rec.mean_iterations_cs += r.iter_cs;
  }
  rec.median_residual_sd = quantile(nmse_sd, 0.5);
  rec.median_residual_cs = quantile(nmse_cs, 0.5);
  rec.median_ratio_cs_over_sd = quantile(ratio, 0.5);
  rec.detect_sd /= cfg.n_trials;
  rec.detect_cs /= cfg.n_trials;
  rec.mean_iterations_sd /= cfg.n_trials;
  rec.mean_iterations_cs /= cfg.n_trials;
  return rec;
}

TrainingTimeReport training_time_report(int n_bs, int n_ms, int g, double t_s, int m_g,
                                        int n_g, int n_rf, int k_hat) {
  TrainingTimeReport rep;
  rep.proposed = 2.0 * g * t_s;
  rep.exhaustive = t_s * n_bs * n_ms;
  const double k1 = k_hat + 1.0;
  rep.hierarchical = t_s * m_g * k1 * k1 * std::ceil(m_g * k1 / n_rf) *
                     (std::log(n_g / k1) / std::log(static_cast<double>(m_g)));
  rep.tracking = 2.0 * t_s;
  return rep;
}

double suggested_block_duration(double d0, double v_max, int n_bs) {
  return d0 / (v_max * n_bs);
}

void monte_carlo_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_config_echo(cfg, out_dir + "/config_echo.json");

  std::ofstream results(out_dir + "/results.csv");
  if (!results) throw std::runtime_error("monte_carlo_sweep: cannot write " + out_dir);
  results << "snr_db,n_bs,n_ms,sigma_theta_deg,sigma_phi_deg,refined,block,"
             "rmse_pos_m,rmse_rot_deg,median_pos_m,median_rot_deg,n_trials,n_failed\n";
  std::ofstream summary(out_dir + "/summary.csv");
  summary << "snr_db,n_bs,n_ms,sigma_theta_deg,sigma_phi_deg,refined,"
             "rmse_max_pos_m,rmse_max_rot_deg,mean_nis_ul,mean_nis_dl,n_trials,n_failed\n";

  const double deg = 180.0 / kPi;
  for (double snr : cfg.snr_sweep) {
    const MetricsRecord rec = monte_carlo_tracking(cfg, snr);
    for (std::size_t b = 0; b < rec.rmse_pos.size(); ++b) {
      results << snr << ',' << cfg.n_bs << ',' << cfg.n_ms << ','
              << cfg.process_noise.sigma_theta * deg << ','
              << cfg.process_noise.sigma_phi * deg << ',' << (cfg.refine ? 1 : 0) << ',' << b
              << ',' << rec.rmse_pos[b] << ',' << rec.rmse_rot[b] * deg << ','
              << rec.median_pos[b] << ',' << rec.median_rot[b] * deg << ','
              << rec.n_trials << ',' << rec.n_failed << '\n';
    }
    summary << snr << ',' << cfg.n_bs << ',' << cfg.n_ms << ','
            << cfg.process_noise.sigma_theta * deg << ',' << cfg.process_noise.sigma_phi * deg
            << ',' << (cfg.refine ? 1 : 0) << ',' << rec.rmse_max_pos << ','
            << rec.rmse_max_rot * deg << ',' << rec.mean_nis_ul << ',' << rec.mean_nis_dl
            << ',' << rec.n_trials << ',' << rec.n_failed << '\n';
  }
}

void training_compare_sweep(const ExperimentConfig& cfg, const std::vector<int>& v_values,
                            const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_config_echo(cfg, out_dir + "/config_echo.json");
  std::ofstream out(out_dir + "/train_compare.csv");
  if (!out) throw std::runtime_error("training_compare_sweep: cannot write " + out_dir);
  out << "snr_db,v,method,median_residual,detect_prob,mean_iterations,n_trials\n";
  for (int v : v_values) {
    for (double snr : cfg.snr_sweep) {
      const TrainingCompareRecord rec = training_compare(cfg, snr, v);
      out << snr << ',' << v << ",sd," << rec.median_residual_sd << ',' << rec.detect_sd
          << ',' << rec.mean_iterations_sd << ',' << rec.n_trials << '\n';
      out << snr << ',' << v << ",cs," << rec.median_residual_cs << ',' << rec.detect_cs
          << ',' << rec.mean_iterations_cs << ',' << rec.n_trials << '\n';
    }
  }
}

}  // namespace lenstrack
