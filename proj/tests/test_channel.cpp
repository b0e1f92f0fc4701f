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

#include "lenstrack/channel.hpp"
#include "test_util.hpp"

using namespace lenstrack;

namespace {
ArrayConfig test_array(int n) { return ArrayConfig::half_wavelength(n, 5e-3); }
}  // namespace

TEST_CASE("steering vector basics") {
  const auto arr = test_array(8);
  const CVec a0 = steering_vector(arr, 0.0);
  for (int i = 0; i < 8; ++i) {
    CHECK(a0(i).real() == doctest::Approx(1.0 / std::sqrt(8.0)));
    CHECK(a0(i).imag() == doctest::Approx(0.0));
  }

  // N=4, d = lambda/2, sin(angle) = 1: phases pi*m over m in {-1.5,...,1.5}
  const auto arr4 = test_array(4);
  const CVec a = steering_vector(arr4, kPi / 2.0);
  const double expected[] = {-1.5 * kPi, -0.5 * kPi, 0.5 * kPi, 1.5 * kPi};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::arg(a(i)) == doctest::Approx(wrap_pm_pi(expected[i])).epsilon(1e-12));
  }

  Rng rng(7);
  std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
  for (int t = 0; t < 20; ++t) {
    CHECK(steering_vector(arr, ang(rng)).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("steering vector derivative matches finite differences") {
  const auto arr = test_array(16);
  Rng rng(3);
  std::uniform_real_distribution<double> ang(-1.3, 1.3);
  for (int t = 0; t < 10; ++t) {
    const double a = ang(rng);
    const double h = 1e-6;
    const CVec fd = (steering_vector(arr, a + h) - steering_vector(arr, a - h)) / (2 * h);
    const CVec an = steering_vector_deriv(arr, a);
    CHECK((fd - an).norm() / an.norm() < 1e-7);
  }
}

TEST_CASE("lens matrix orthogonality") {
  for (int n : {1, 4, 7, 32}) {
    const auto arr = test_array(n);
    const CMat u = lens_matrix(arr);
    const CMat gram = u.adjoint() * u;
    CHECK((gram - double(n) * CMat::Identity(n, n)).norm() < 1e-10 * n);
  }
  // beam p = 0 is the all-ones column
  const CMat u = lens_matrix(test_array(5));
  for (int m = 0; m < 5; ++m) {
    CHECK(u(m, 2).real() == doctest::Approx(1.0));
    CHECK(u(m, 2).imag() == doctest::Approx(0.0));
  }
  CHECK(lens_matrix(test_array(1))(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("chi kernel limits and zeros") {
  for (int n : {4, 5, 32}) {
    CHECK(chi_kernel(n, 0.0) == doctest::Approx(std::sqrt(double(n))).epsilon(1e-12));
    for (int i = 1; i < n; ++i) {
      CHECK(std::abs(chi_kernel(n, double(i) / n)) < 1e-9);
    }
    // integer argument: limit (-1)^(N-1) * sqrt(N), confirmed by approach
    const double at_one = chi_kernel(n, 1.0);
    const double expected = ((n - 1) % 2 == 0 ? 1.0 : -1.0) * std::sqrt(double(n));
    CHECK(at_one == doctest::Approx(expected).epsilon(1e-9));
    CHECK(chi_kernel(n, 1.0 - 1e-7) == doctest::Approx(expected).epsilon(1e-4));
  }
}

TEST_CASE("chi kernel derivative matches finite differences") {
  Rng rng(11);
  std::uniform_real_distribution<double> xs(-1.5, 1.5);
  for (int n : {8, 32}) {
    for (int t = 0; t < 50; ++t) {
      double x = xs(rng);
      if (std::abs(x - std::round(x)) < 1e-3) x += 2e-3;
      const double h = 1e-7;
      const double fd = (chi_kernel(n, x + h) - chi_kernel(n, x - h)) / (2 * h);
      CHECK(chi_kernel_deriv(n, x) == doctest::Approx(fd).epsilon(1e-5));
    }
    // near-integer region uses the series branch
    const double fd = (chi_kernel(n, 1e-7 + 1e-9) - chi_kernel(n, 1e-7 - 1e-9)) / 2e-9;
    CHECK(chi_kernel_deriv(n, 1e-7) == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("closed form equals direct beamspace transform") {
  Rng rng(42);
  const auto ofdm = testutil::test_ofdm(8);
  for (int trial = 0; trial < 12; ++trial) {
    const int n_bs = (trial % 3 == 0) ? 8 : 16;
    const int n_ms = (trial % 2 == 0) ? 8 : 12;
    const auto bs = ArrayConfig::half_wavelength(n_bs, ofdm.wavelength());
    const auto ms = ArrayConfig::half_wavelength(n_ms, ofdm.wavelength());
    const auto paths = testutil::random_paths(1 + trial % 3, ofdm, rng);
    const auto direct = beamspace_channel_direct(paths, bs, ms, ofdm);
    const auto closed = beamspace_channel_closed(paths, bs, ms, ofdm);
    for (int n = 0; n < ofdm.n_subcarriers; ++n) {
      CHECK((direct[n] - closed[n]).norm() / direct[n].norm() < 1e-10);
    }
  }
}

TEST_CASE("beamspace channel norms and edge cases") {
  const auto ofdm = testutil::test_ofdm(4);
  const auto bs = ArrayConfig::half_wavelength(16, ofdm.wavelength());
  const auto ms = ArrayConfig::half_wavelength(8, ofdm.wavelength());

  SUBCASE("no paths gives zero") {
    const auto h = beamspace_channel_closed({}, bs, ms, ofdm);
    for (const auto& m : h) CHECK(m.norm() == 0.0);
  }

  SUBCASE("zero gain gives zero") {
    PathParams p;
    p.tau = 10e-9;
    p.theta = 0.3;
    p.phi = -0.2;
    p.gain = 0.0;
    const auto h = beamspace_channel_direct({p}, bs, ms, ofdm);
    for (const auto& m : h) CHECK(m.norm() == 0.0);
  }

  SUBCASE("single path subcarrier 0 is rank one with scaled norm") {
    PathParams p;
    p.tau = 10e-9;
    p.theta = 0.4;
    p.phi = -0.7;
    p.gain = Complex(0.8, -0.6);
    const auto h = beamspace_channel_direct({p}, bs, ms, ofdm);
    const double expected = std::abs(p.gain) * std::sqrt(16.0 * 8.0);
    CHECK(h[0].norm() == doctest::Approx(expected).epsilon(1e-10));
    const Eigen::JacobiSVD<CMat> svd(h[0]);
    CHECK(svd.singularValues()(1) < 1e-10 * svd.singularValues()(0));
  }

  SUBCASE("Frobenius scaling against the antenna-domain channel") {
    Rng rng(5);
    const auto paths = testutil::random_paths(3, ofdm, rng);
    const auto bsch = beamspace_channel_direct(paths, bs, ms, ofdm);
    for (int n = 0; n < ofdm.n_subcarriers; ++n) {
      CMat h = CMat::Zero(ms.n_elements, bs.n_elements);
      for (const auto& p : paths) {
        h += subcarrier_gain(p, n, ofdm) * steering_vector(ms, p.phi) *
             steering_vector(bs, p.theta).adjoint();
      }
      CHECK(bsch[n].norm() ==
            doctest::Approx(std::sqrt(8.0 * 16.0) * h.norm()).epsilon(1e-10));
    }
  }

  SUBCASE("on-grid path concentrates on a single entry") {
    PathParams p;
    p.tau = 0.0;
    p.theta = bs.beam_angle(11);
    p.phi = ms.beam_angle(2);
    p.gain = Complex(1.0, 0.0);
    const auto h = beamspace_channel_closed({p}, bs, ms, ofdm);
    CHECK(std::abs(h[0](2, 11)) == doctest::Approx(std::sqrt(8.0 * 16.0)).epsilon(1e-9));
    CHECK(h[0].cwiseAbs().sum() ==
          doctest::Approx(std::abs(h[0](2, 11))).epsilon(1e-8));
  }
}

TEST_CASE("sparse beamspace vector") {
  const auto ofdm = testutil::test_ofdm(8);
  const auto bs = ArrayConfig::half_wavelength(16, ofdm.wavelength());
  const auto ms = ArrayConfig::half_wavelength(32, ofdm.wavelength());

  SUBCASE("zero gain gives zero") {
    PathParams p;
    p.gain = 0.0;
    p.tau = 1e-9;
    const auto v = sparse_beamspace_vector({p}, ms, bs, ofdm, ArraySide::Ms);
    for (const auto& x : v) CHECK(x.norm() == 0.0);
  }

  SUBCASE("single on-grid path concentrates energy") {
    PathParams p;
    p.tau = 5e-9;
    p.phi = ms.beam_angle(20);
    p.theta = 0.1;
    p.gain = Complex(1.0, 0.5);
    const auto v = sparse_beamspace_vector({p}, ms, bs, ofdm, ArraySide::Ms);
    double top = 0.0, total = 0.0;
    for (const auto& x : v) {
      top += std::norm(x(20));
      total += x.squaredNorm();
    }
    CHECK(top / total >= 0.8);
  }

  SUBCASE("chi entries sum to about sqrt(N)") {
    // The all-ones-splitter identity is an approximation whose error grows
    // toward end-fire (the even-N kernel is antiperiodic, so the wrapped
    // alias flips sign): 5% holds on |theta| <= 0.6 rad, 30% out to 1.3 rad.
    const auto arr = ArrayConfig::half_wavelength(32, ofdm.wavelength());
    for (int i = 0; i <= 200; ++i) {
      const double theta = -0.6 + 1.2 * i / 200.0;
      const double s = chi_vector(arr, theta).sum();
      CHECK(std::abs(s - std::sqrt(32.0)) <= 0.05 * std::sqrt(32.0));
    }
    for (int i = 0; i <= 200; ++i) {
      const double theta = -1.3 + 2.6 * i / 200.0;
      const double s = chi_vector(arr, theta).sum();
      CHECK(std::abs(s - std::sqrt(32.0)) <= 0.30 * std::sqrt(32.0));
    }
  }
}

TEST_CASE("V strongest chi entries form a contiguous block around the peak") {
  const auto arr = test_array(32);
  for (int i = 0; i <= 400; ++i) {
    const double angle = -1.45 + 2.9 * i / 400.0;
    const VecX mags = chi_vector(arr, angle).cwiseAbs();
    std::vector<int> idx(32);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return mags(a) > mags(b); });
    for (int v : {2, 3}) {
      // strongest v indices must be consecutive modulo N and contain the peak
      std::vector<int> top(idx.begin(), idx.begin() + v);
      std::sort(top.begin(), top.end());
      bool contiguous = false;
      for (int shift = 0; shift < v; ++shift) {
        bool ok = true;
        for (int j = 0; j < v; ++j) {
          const int expect = (top[shift] + j) % 32;
          if (std::find(top.begin(), top.end(), expect) == top.end()) ok = false;
        }
        if (ok) contiguous = true;
      }
      CHECK(contiguous);
      CHECK(std::find(top.begin(), top.end(), idx[0]) != top.end());
    }
  }
}
