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

#include "lenstrack/config_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lenstrack/harness.hpp"

namespace lenstrack {

namespace {

using nlohmann::json;

constexpr double kDeg = kPi / 180.0;

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.scene.bs = Vec2(0.0, 0.0);
  cfg.scene.ms = Vec2(4.0, 2.0);
  cfg.scene.ms_rotation = kPi;
  cfg.scene.scatterers = {Vec2(2.5, 3.5), Vec2(3.0, -2.0)};
  cfg.training.g_beams = 16;
  cfg.training.v_elements = 3;
  cfg.training.p_fa = 1e-3;
  cfg.training.max_paths = 6;
  cfg.trajectory.tau_rate = 0.0667e-9 / cfg.t_b;       // 0.0667 ns per block
  cfg.trajectory.theta_rate = 0.4529 * kDeg / cfg.t_b; // 0.4529 deg per block
  cfg.trajectory.phi_rate = 0.2265 * kDeg / cfg.t_b;   // 0.2265 deg per block
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  json j;
  in >> j;

  ExperimentConfig cfg = default_config();
  if (j.contains("scene")) {
    const auto& s = j["scene"];
    if (s.contains("bs")) cfg.scene.bs = Vec2(s["bs"][0].get<double>(), s["bs"][1].get<double>());
    if (s.contains("ms")) cfg.scene.ms = Vec2(s["ms"][0].get<double>(), s["ms"][1].get<double>());
    if (s.contains("ms_rotation_deg")) {
      cfg.scene.ms_rotation = wrap_two_pi(s["ms_rotation_deg"].get<double>() * kDeg);
    }
    if (s.contains("scatterers")) {
      cfg.scene.scatterers.clear();
      for (const auto& sc : s["scatterers"]) {
        cfg.scene.scatterers.emplace_back(sc[0].get<double>(), sc[1].get<double>());
      }
    }
  }
  if (j.contains("scene_model")) {
    const auto& s = j["scene_model"];
    maybe(s, "nlos_reflection_loss", cfg.scene_model.nlos_reflection_loss);
    maybe(s, "path_magnitudes", cfg.scene_model.path_magnitudes);
  }
  if (j.contains("arrays")) {
    maybe(j["arrays"], "n_bs", cfg.n_bs);
    maybe(j["arrays"], "n_ms", cfg.n_ms);
  }
  if (j.contains("ofdm")) {
    const auto& o = j["ofdm"];
    maybe(o, "n_subcarriers", cfg.ofdm.n_subcarriers);
    maybe(o, "bandwidth_hz", cfg.ofdm.bandwidth);
    maybe(o, "cp_length", cfg.ofdm.cp_length);
    maybe(o, "carrier_freq_hz", cfg.ofdm.carrier_freq);
  }
  if (j.contains("training")) {
    const auto& t = j["training"];
    maybe(t, "g_beams", cfg.training.g_beams);
    maybe(t, "v_elements", cfg.training.v_elements);
    maybe(t, "p_fa", cfg.training.p_fa);
    maybe(t, "max_paths", cfg.training.max_paths);
    maybe(t, "refine", cfg.refine);
    maybe(t, "refine_grid", cfg.refine_grid);
    maybe(t, "n_sub_uplink", cfg.n_sub_uplink);
    maybe(t, "delay_grid_points", cfg.delay_grid_points);
  }
  if (j.contains("process_noise")) {
    const auto& p = j["process_noise"];
    double tau_ns = cfg.process_noise.sigma_tau * 1e9;
    double th = cfg.process_noise.sigma_theta / kDeg;
    double ph = cfg.process_noise.sigma_phi / kDeg;
    maybe(p, "sigma_tau_ns", tau_ns);
    maybe(p, "sigma_theta_deg", th);
    maybe(p, "sigma_phi_deg", ph);
    maybe(p, "cross_corr", cfg.process_noise.cross_corr);
    cfg.process_noise.sigma_tau = tau_ns * 1e-9;
    cfg.process_noise.sigma_theta = th * kDeg;
    cfg.process_noise.sigma_phi = ph * kDeg;
  }
  if (j.contains("tracking")) {
    const auto& t = j["tracking"];
    maybe(t, "t_b_s", cfg.t_b);
    maybe(t, "t_ob_s", cfg.t_ob);
    double smt = cfg.sigma_max_theta / kDeg;
    double smp = cfg.sigma_max_phi / kDeg;
    maybe(t, "sigma_max_theta_deg", smt);
    maybe(t, "sigma_max_phi_deg", smp);
    cfg.sigma_max_theta = smt * kDeg;
    cfg.sigma_max_phi = smp * kDeg;
    maybe(t, "one_bit_rx", cfg.one_bit_rx);
    maybe(t, "rx_beam_margin", cfg.rx_beam_margin);
    maybe(t, "nlos_noise_inflation_db", cfg.nlos_noise_inflation_db);
    maybe(t, "recenter_rx_per_block", cfg.recenter_rx_per_block);
    maybe(t, "init_var_scale", cfg.init_var_scale);
    maybe(t, "process_noise_on_truth", cfg.process_noise_on_truth);
  }
  if (j.contains("trajectory")) {
    const auto& t = j["trajectory"];
    double tau_ns_pb = cfg.trajectory.tau_rate * cfg.t_b * 1e9;
    double th_pb = cfg.trajectory.theta_rate * cfg.t_b / kDeg;
    double ph_pb = cfg.trajectory.phi_rate * cfg.t_b / kDeg;
    maybe(t, "tau_rate_ns_per_block", tau_ns_pb);
    maybe(t, "theta_rate_deg_per_block", th_pb);
    maybe(t, "phi_rate_deg_per_block", ph_pb);
    cfg.trajectory.tau_rate = tau_ns_pb * 1e-9 / cfg.t_b;
    cfg.trajectory.theta_rate = th_pb * kDeg / cfg.t_b;
    cfg.trajectory.phi_rate = ph_pb * kDeg / cfg.t_b;
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    maybe(s, "snr_db", cfg.snr_sweep);
    maybe(s, "n_trials", cfg.n_trials);
    maybe(s, "rng_seed", cfg.rng_seed);
    maybe(s, "n_threads", cfg.n_threads);
  }
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["scene"]["bs"] = {cfg.scene.bs.x(), cfg.scene.bs.y()};
  j["scene"]["ms"] = {cfg.scene.ms.x(), cfg.scene.ms.y()};
  j["scene"]["ms_rotation_deg"] = cfg.scene.ms_rotation / kDeg;
  j["scene"]["scatterers"] = json::array();
  for (const auto& s : cfg.scene.scatterers) {
    j["scene"]["scatterers"].push_back({s.x(), s.y()});
  }
  j["scene_model"]["nlos_reflection_loss"] = cfg.scene_model.nlos_reflection_loss;
  j["scene_model"]["path_magnitudes"] = cfg.scene_model.path_magnitudes;
  j["arrays"]["n_bs"] = cfg.n_bs;
  j["arrays"]["n_ms"] = cfg.n_ms;
  j["ofdm"]["n_subcarriers"] = cfg.ofdm.n_subcarriers;
  j["ofdm"]["bandwidth_hz"] = cfg.ofdm.bandwidth;
  j["ofdm"]["cp_length"] = cfg.ofdm.cp_length;
  j["ofdm"]["carrier_freq_hz"] = cfg.ofdm.carrier_freq;
  j["training"]["g_beams"] = cfg.training.g_beams;
  j["training"]["v_elements"] = cfg.training.v_elements;
  j["training"]["p_fa"] = cfg.training.p_fa;
  j["training"]["max_paths"] = cfg.training.max_paths;
  j["training"]["refine"] = cfg.refine;
  j["training"]["refine_grid"] = cfg.refine_grid;
  j["training"]["n_sub_uplink"] = cfg.n_sub_uplink;
  j["training"]["delay_grid_points"] = cfg.delay_grid_points;
  j["process_noise"]["sigma_tau_ns"] = cfg.process_noise.sigma_tau * 1e9;
  j["process_noise"]["sigma_theta_deg"] = cfg.process_noise.sigma_theta / kDeg;
  j["process_noise"]["sigma_phi_deg"] = cfg.process_noise.sigma_phi / kDeg;
  j["process_noise"]["cross_corr"] = cfg.process_noise.cross_corr;
  j["trajectory"]["tau_rate_ns_per_block"] = cfg.trajectory.tau_rate * cfg.t_b * 1e9;
  j["trajectory"]["theta_rate_deg_per_block"] = cfg.trajectory.theta_rate * cfg.t_b / kDeg;
  j["trajectory"]["phi_rate_deg_per_block"] = cfg.trajectory.phi_rate * cfg.t_b / kDeg;
  j["tracking"]["t_b_s"] = cfg.t_b;
  j["tracking"]["t_ob_s"] = cfg.t_ob;
  j["tracking"]["sigma_max_theta_deg"] = cfg.sigma_max_theta / kDeg;
  j["tracking"]["sigma_max_phi_deg"] = cfg.sigma_max_phi / kDeg;
  j["tracking"]["one_bit_rx"] = cfg.one_bit_rx;
  j["tracking"]["rx_beam_margin"] = cfg.rx_beam_margin;
  j["tracking"]["nlos_noise_inflation_db"] = cfg.nlos_noise_inflation_db;
  j["tracking"]["recenter_rx_per_block"] = cfg.recenter_rx_per_block;
  j["tracking"]["init_var_scale"] = cfg.init_var_scale;
  j["tracking"]["process_noise_on_truth"] = cfg.process_noise_on_truth;
  j["sweep"]["snr_db"] = cfg.snr_sweep;
  j["sweep"]["n_trials"] = cfg.n_trials;
  j["sweep"]["rng_seed"] = cfg.rng_seed;
  j["sweep"]["n_threads"] = cfg.n_threads;
  return j.dump(2);
}

void write_config_echo(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_config_echo: cannot write " + path);
  out << config_to_json(cfg) << '\n';
}

}  // namespace lenstrack
