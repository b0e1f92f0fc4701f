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

#include "lenstrack/channel.hpp"

#include <algorithm>
#include <cmath>

namespace lenstrack {

double ArrayConfig::spatial_freq(double angle) const {
  return spacing / wavelength * std::sin(angle);
}

double ArrayConfig::beam_angle(int i) const {
  double s = wavelength / spacing * sym_index(i) / n_elements;
  s = std::clamp(s, -1.0, 1.0);
  return std::asin(s);
}

double ArrayConfig::grid_cell_width(double angle) const {
  const double c = std::max(std::cos(angle), 1e-3);
  return wavelength / (spacing * n_elements) / c;
}

CVec steering_vector(const ArrayConfig& array, double angle) {
  const int n = array.n_elements;
  const double freq = array.spatial_freq(angle);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVec a(n);
  for (int i = 0; i < n; ++i) {
    a(i) = std::polar(scale, 2.0 * kPi * array.sym_index(i) * freq);
  }
  return a;
}

CVec steering_vector_deriv(const ArrayConfig& array, double angle) {
  const int n = array.n_elements;
  const double dfreq = array.spacing / array.wavelength * std::cos(angle);
  CVec a = steering_vector(array, angle);
  for (int i = 0; i < n; ++i) {
    a(i) *= Complex(0.0, 2.0 * kPi * array.sym_index(i) * dfreq);
  }
  return a;
}

CMat lens_matrix(const ArrayConfig& array) {
  const int n = array.n_elements;
  CMat u(n, n);
  for (int p = 0; p < n; ++p) {
    for (int m = 0; m < n; ++m) {
      u(m, p) = std::polar(1.0, 2.0 * kPi * array.sym_index(m) * array.sym_index(p) / n);
    }
  }
  return u;
}

namespace {

// Splits x into nearest integer q and remainder s in [-1/2, 1/2]; via
// sin(pi*(s+q)) = (-1)^q sin(pi*s) the kernel reduces to the principal
// interval, where small-|s| series expansions are stable.
struct ChiReduction {
  double s;
  double sign;  // (-1)^((N-1)*q)
};

ChiReduction reduce_chi_arg(int n, double x) {
  const double q = std::round(x);
  const double s = x - q;
  const bool odd_q = std::fmod(std::abs(q), 2.0) >= 0.5;
  // (-1)^(N*q) / (-1)^q = (-1)^((N-1)*q)
  const bool flip = odd_q && (n % 2 == 0);
  return {s, flip ? -1.0 : 1.0};
}

}  // namespace

double chi_kernel(int n_elements, double x) {
  const double n = n_elements;
  const auto [s, sign] = reduce_chi_arg(n_elements, x);
  if (std::abs(std::sin(kPi * s)) < 1e-8) {
    // chi = sign * sqrt(N) * (1 - pi^2 (N^2-1) s^2 / 6 + O(s^4))
    return sign * std::sqrt(n) * (1.0 - kPi * kPi * (n * n - 1.0) * s * s / 6.0);
  }
  return sign * std::sin(kPi * n * s) / (std::sqrt(n) * std::sin(kPi * s));
}

double chi_kernel_deriv(int n_elements, double x) {
  const double n = n_elements;
  const auto [s, sign] = reduce_chi_arg(n_elements, x);
  if (std::abs(s) < 1e-6) {
    // chi' = -sign * sqrt(N) * pi^2 (N^2-1) s / 3 + O(s^3)
    return -sign * std::sqrt(n) * kPi * kPi * (n * n - 1.0) * s / 3.0;
  }
  const double sp = std::sin(kPi * s);
  const double num = kPi * n * std::cos(kPi * n * s) * sp - kPi * std::cos(kPi * s) * std::sin(kPi * n * s);
  return sign * num / (std::sqrt(n) * sp * sp);
}

VecX chi_vector(const ArrayConfig& array, double angle) {
  const int n = array.n_elements;
  const double freq = array.spatial_freq(angle);
  VecX v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = chi_kernel(n, freq - array.sym_index(i) / n);
  }
  return v;
}

VecX chi_vector_deriv(const ArrayConfig& array, double angle) {
  const int n = array.n_elements;
  const double freq = array.spatial_freq(angle);
  const double dfreq = array.spacing / array.wavelength * std::cos(angle);
  VecX v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = chi_kernel_deriv(n, freq - array.sym_index(i) / n) * dfreq;
  }
  return v;
}

Complex subcarrier_gain(const PathParams& path, int subcarrier, const OfdmConfig& ofdm) {
  const double arg = -2.0 * kPi * subcarrier * path.tau /
                     (ofdm.n_subcarriers * ofdm.sample_period());
  return path.gain * std::polar(1.0, arg);
}

BeamspaceChannel beamspace_channel_direct(const std::vector<PathParams>& paths,
                                          const ArrayConfig& bs, const ArrayConfig& ms,
                                          const OfdmConfig& ofdm) {
  const CMat u_bs = lens_matrix(bs);
  const CMat u_ms = lens_matrix(ms);
  BeamspaceChannel out(ofdm.n_subcarriers, CMat::Zero(ms.n_elements, bs.n_elements));
  for (int n = 0; n < ofdm.n_subcarriers; ++n) {
    CMat h = CMat::Zero(ms.n_elements, bs.n_elements);
    for (const auto& path : paths) {
      h += subcarrier_gain(path, n, ofdm) * steering_vector(ms, path.phi) *
           steering_vector(bs, path.theta).adjoint();
    }
    out[n] = u_ms.adjoint() * h * u_bs;
  }
  return out;
}

BeamspaceChannel beamspace_channel_closed(const std::vector<PathParams>& paths,
                                          const ArrayConfig& bs, const ArrayConfig& ms,
                                          const OfdmConfig& ofdm) {
  BeamspaceChannel out(ofdm.n_subcarriers, CMat::Zero(ms.n_elements, bs.n_elements));
  std::vector<VecX> chi_ms(paths.size()), chi_bs(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    chi_ms[k] = chi_vector(ms, paths[k].phi);
    chi_bs[k] = chi_vector(bs, paths[k].theta);
  }
  for (int n = 0; n < ofdm.n_subcarriers; ++n) {
    for (std::size_t k = 0; k < paths.size(); ++k) {
      out[n] += subcarrier_gain(paths[k], n, ofdm) *
                (chi_ms[k] * chi_bs[k].transpose()).cast<Complex>();
    }
  }
  return out;
}

std::vector<CVec> sparse_beamspace_vector(const std::vector<PathParams>& paths,
                                          const ArrayConfig& own, const ArrayConfig& peer,
                                          const OfdmConfig& ofdm, ArraySide side) {
  const double scale = std::sqrt(static_cast<double>(peer.n_elements));
  std::vector<VecX> chi(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    chi[k] = chi_vector(own, side == ArraySide::Ms ? paths[k].phi : paths[k].theta);
  }
  std::vector<CVec> out(ofdm.n_subcarriers, CVec::Zero(own.n_elements));
  for (int n = 0; n < ofdm.n_subcarriers; ++n) {
    for (std::size_t k = 0; k < paths.size(); ++k) {
      out[n] += scale * subcarrier_gain(paths[k], n, ofdm) * chi[k].cast<Complex>();
    }
  }
  return out;
}

}  // namespace lenstrack
