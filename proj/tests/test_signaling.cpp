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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lenstrack/beamforming.hpp"
#include "lenstrack/signaling.hpp"
#include "test_util.hpp"

using namespace lenstrack;

TEST_CASE("sensing matrix construction") {
  const auto ofdm = testutil::test_ofdm(8);
  TrainingConfig cfg;
  cfg.g_beams = 16;

  Rng rng(123);
  const SensingMatrix s = make_sensing_matrix(32, cfg, ofdm, rng);
  for (int i = 0; i < s.selector.rows(); ++i) {
    for (int j = 0; j < s.selector.cols(); ++j) {
      CHECK(std::abs(std::abs(s.selector(i, j)) - 1.0) < 1e-15);
    }
  }
  for (int j = 0; j < s.combiner_bb.size(); ++j) {
    CHECK(std::abs(s.combiner_bb(j)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  for (int g = 0; g < s.n_beams(); ++g) {
    for (int n = 0; n < s.n_subcarriers(); ++n) {
      CHECK(std::abs(s.tx_symbols(g, n)) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("deterministic given the seed") {
    Rng rng_a(77), rng_b(77);
    const SensingMatrix a = make_sensing_matrix(16, cfg, ofdm, rng_a);
    const SensingMatrix b = make_sensing_matrix(16, cfg, ofdm, rng_b);
    CHECK((a.selector - b.selector).norm() == 0.0);
    CHECK((a.combiner_bb - b.combiner_bb).norm() == 0.0);
  }

  SUBCASE("column coherence stays moderate") {
    // For 32 x 16 Bernoulli selectors the max pairwise coherence sits at a
    // median of 16/32 = 0.5 (sum of 32 Rademacher signs); ~93% of seeds stay
    // below 0.57 and essentially all below 0.75.
    std::vector<double> worst_per_seed;
    for (int seed = 0; seed < 100; ++seed) {
      Rng r(seed);
      const SensingMatrix m = make_sensing_matrix(32, cfg, ofdm, r);
      const CMat omega = m.omega(0);
      double worst = 0.0;
      for (int i = 0; i < omega.cols(); ++i) {
        for (int j = i + 1; j < omega.cols(); ++j) {
          const double c = std::abs((omega.col(i).adjoint() * omega.col(j))(0)) /
                           (omega.col(i).norm() * omega.col(j).norm());
          worst = std::max(worst, c);
        }
      }
      worst_per_seed.push_back(worst);
    }
    std::sort(worst_per_seed.begin(), worst_per_seed.end());
    CHECK(worst_per_seed[50] <= 0.51);  // median
    CHECK(worst_per_seed[89] <= 0.57);  // 90th percentile
    CHECK(worst_per_seed.back() <= 0.82);
  }
}

TEST_CASE("training receive synthesis") {
  const auto ofdm = testutil::test_ofdm(8);
  const auto bs = ArrayConfig::half_wavelength(16, ofdm.wavelength());
  const auto ms = ArrayConfig::half_wavelength(32, ofdm.wavelength());
  TrainingConfig cfg;
  cfg.g_beams = 12;
  Rng rng(5);
  const SensingMatrix sensing = make_sensing_matrix(32, cfg, ofdm, rng);

  SUBCASE("zero channel, zero noise gives zero") {
    std::vector<CVec> h(ofdm.n_subcarriers, CVec::Zero(32));
    Rng nr(1);
    const auto y = synthesize_training_rx(h, sensing, 0.0, nr);
    for (const auto& v : y) CHECK(v.norm() == 0.0);
  }

  SUBCASE("noiseless on-grid path matches the linear model") {
    PathParams p;
    p.tau = 6e-9;
    p.phi = ms.beam_angle(20);
    p.theta = 0.2;
    p.gain = Complex(0.7, 0.3);
    const auto h = sparse_beamspace_vector({p}, ms, bs, ofdm, ArraySide::Ms);
    Rng nr(1);
    const auto y = synthesize_training_rx(h, sensing, 0.0, nr);
    for (int n = 0; n < ofdm.n_subcarriers; ++n) {
      const CVec expected = sensing.operator_matrix(n) *
                            (std::sqrt(16.0) * subcarrier_gain(p, n, ofdm) *
                             chi_vector(ms, p.phi).cast<Complex>());
      CHECK((y[n] - expected).norm() < 1e-12 * expected.norm());
    }
  }

  SUBCASE("noise psd hits the SNR target") {
    Rng prng(9);
    const auto paths = testutil::random_paths(2, ofdm, prng);
    const auto h = sparse_beamspace_vector(paths, ms, bs, ofdm, ArraySide::Ms);
    const double n0 = noise_psd_for_snr(3.0, sensing, h);
    // +10 dB divides N0 by 10
    CHECK(noise_psd_for_snr(13.0, sensing, h) == doctest::Approx(n0 / 10.0).epsilon(1e-12));

    double signal_energy = 0.0;
    std::vector<CVec> clean(ofdm.n_subcarriers);
    for (int n = 0; n < ofdm.n_subcarriers; ++n) {
      clean[n] = sensing.operator_matrix(n) * h[n];
      signal_energy += clean[n].squaredNorm();
    }
    Rng nr(33);
    double noise_energy = 0.0;
    const int n_draws = 50;
    for (int d = 0; d < n_draws; ++d) {
      const auto y = synthesize_training_rx(h, sensing, n0, nr);
      for (int n = 0; n < ofdm.n_subcarriers; ++n) {
        noise_energy += (y[n] - clean[n]).squaredNorm();
      }
    }
    const double snr_emp = 10.0 * std::log10(signal_energy / (noise_energy / n_draws));
    CHECK(std::abs(snr_emp - 3.0) < 0.3);

    // 0 dB makes expected noise energy equal the signal energy
    const double n0_0db = noise_psd_for_snr(0.0, sensing, h);
    const double expected_noise =
        n0_0db * 32.0 * 32.0 * sensing.n_beams() * ofdm.n_subcarriers;
    CHECK(expected_noise == doctest::Approx(signal_energy).epsilon(1e-9));
  }

  SUBCASE("zero signal rejected") {
    std::vector<CVec> h(ofdm.n_subcarriers, CVec::Zero(32));
    CHECK_THROWS_AS(noise_psd_for_snr(0.0, sensing, h), std::invalid_argument);
  }

  SUBCASE("combined noise covariance is N0 * N_ant * F^H F") {
    const auto ofdm_small = testutil::test_ofdm(2);
    TrainingConfig small_cfg;
    small_cfg.g_beams = 6;
    Rng sr(4);
    const SensingMatrix sm = make_sensing_matrix(8, small_cfg, ofdm_small, sr);
    std::vector<CVec> h(ofdm_small.n_subcarriers, CVec::Zero(8));
    const double n0 = 0.37;
    CMat emp = CMat::Zero(6, 6);
    Rng nr(8);
    const int n_draws = 10000;
    for (int d = 0; d < n_draws; ++d) {
      const auto y = synthesize_training_rx(h, sm, n0, nr);
      emp += y[0] * y[0].adjoint();
    }
    emp /= n_draws;
    const CMat omega = sm.omega(0);
    const CMat expected = n0 * 8.0 * (omega.adjoint() * omega);
    CHECK((emp - expected).norm() / expected.norm() < 0.05);
  }
}

TEST_CASE("tracking observation") {
  const auto ofdm = testutil::test_ofdm(8);
  const auto bs = ArrayConfig::half_wavelength(16, ofdm.wavelength());
  const auto ms = ArrayConfig::half_wavelength(16, ofdm.wavelength());
  const Beamformer tx = heuristic_beamformer(0.2, 3, ms);
  const Beamformer rx = heuristic_beamformer(0.5, 5, bs);
  const PilotBlock pilots = PilotBlock::uniform(ofdm.n_subcarriers, 3);

  PathParams p;
  p.tau = 8e-9;
  p.theta = 0.45;
  p.phi = 0.25;
  p.gain = Complex(1.2, -0.4);

  SUBCASE("shape and linearity") {
    const CVec y = tracking_observation({p}, tx, rx, pilots, bs, ms, ofdm,
                                        LinkDirection::Uplink);
    CHECK(y.size() == ofdm.n_subcarriers * 5);
    PathParams doubled = p;
    doubled.gain *= 2.0;
    const CVec y2 = tracking_observation({doubled}, tx, rx, pilots, bs, ms, ofdm,
                                         LinkDirection::Uplink);
    CHECK((y2 - 2.0 * y).norm() < 1e-12 * y.norm());
  }

  SUBCASE("zero gains give pure noise") {
    PathParams silent = p;
    silent.gain = 0.0;
    Rng nr(2);
    const CVec y = synthesize_tracking_rx({silent}, tx, rx, pilots, bs, ms, ofdm, 0.0,
                                          LinkDirection::Uplink, nr);
    CHECK(y.norm() == 0.0);
  }

  SUBCASE("pilot shape mismatch rejected") {
    const PilotBlock bad = PilotBlock::uniform(ofdm.n_subcarriers, 2);
    CHECK_THROWS_AS(tracking_observation({p}, tx, rx, bad, bs, ms, ofdm,
                                         LinkDirection::Uplink),
                    std::invalid_argument);
  }

  SUBCASE("matches the beamspace kernel formulation") {
    // oracle: theta = h * (X0 F_tx^T chi_tx (.) a(tau)) kron (F_rx^H chi_rx)
    // with F the beamspace coefficient matrices of the two beamformers
    const CMat lens_ms = lens_matrix(ms);
    const CMat lens_bs = lens_matrix(bs);
    const CMat f_tx = beamspace_coefficients(tx, lens_ms);
    const CMat f_rx = beamspace_coefficients(rx, lens_bs);
    const CVec chi_tx = chi_vector(ms, p.phi).cast<Complex>();
    const CVec chi_rx = chi_vector(bs, p.theta).cast<Complex>();
    const CVec u = pilots.symbols * (f_tx.transpose() * chi_tx);
    const CVec b = f_rx.adjoint() * chi_rx;
    CVec expected(ofdm.n_subcarriers * 5);
    for (int n = 0; n < ofdm.n_subcarriers; ++n) {
      expected.segment(n * 5, 5) = subcarrier_gain(p, n, ofdm) * u(n) * b;
    }
    const CVec y = tracking_observation({p}, tx, rx, pilots, bs, ms, ofdm,
                                        LinkDirection::Uplink);
    CHECK((y - expected).norm() < 1e-10 * expected.norm());
  }

  SUBCASE("downlink swaps the array roles") {
    const Beamformer tx_bs = heuristic_beamformer(0.45, 3, bs);
    const Beamformer rx_ms = heuristic_beamformer(0.25, 4, ms);
    const CVec y = tracking_observation({p}, tx_bs, rx_ms, pilots, bs, ms, ofdm,
                                        LinkDirection::Downlink);
    CHECK(y.size() == ofdm.n_subcarriers * 4);
    CHECK(y.norm() > 0.0);
  }

  SUBCASE("combined tracking noise covariance") {
    const CMat cov = tracking_noise_covariance(rx, 0.5);
    CMat emp = CMat::Zero(5, 5);
    Rng nr(12);
    PathParams silent = p;
    silent.gain = 0.0;
    const int n_draws = 8000;
    for (int d = 0; d < n_draws; ++d) {
      const CVec y = synthesize_tracking_rx({silent}, tx, rx, pilots, bs, ms, ofdm, 0.5,
                                            LinkDirection::Uplink, nr);
      emp += y.segment(0, 5) * y.segment(0, 5).adjoint();
    }
    emp /= n_draws;
    CHECK((emp - cov).norm() / cov.norm() < 0.06);
    // equivalently N0 * N_ant * F^H F in beamspace coefficients
    const CMat f_rx = beamspace_coefficients(rx, lens_matrix(bs));
    CHECK((cov - 0.5 * 16.0 * f_rx.adjoint() * f_rx).norm() < 1e-10 * cov.norm());
  }
}
