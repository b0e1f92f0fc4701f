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

#include "lenstrack/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lenstrack {

namespace {

// Squared Dirichlet pattern (sin(pi*N*u) / (N*sin(pi*u)))^2, peak 1 at u=0.
double pattern_sq(int n, double u) {
  const double chi = chi_kernel(n, u);  // sin(pi*N*u)/(sqrt(N)sin(pi*u))
  return chi * chi / n;
}

constexpr double kEndFireMargin = 1e-3;

double clamp_angle(double a) {
  return std::clamp(a, -kPi / 2.0 + kEndFireMargin, kPi / 2.0 - kEndFireMargin);
}

}  // namespace

double delta_phi_3db(const ArrayConfig& array) {
  const int n = array.n_elements;
  if (n < 2) throw std::invalid_argument("delta_phi_3db: need at least 2 elements");
  // Half-power point of the mainlobe in normalized spatial frequency:
  // pattern_sq decreases monotonically from 1 to 0 on (0, 1/N).
  double lo = 0.0, hi = 1.0 / n;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pattern_sq(n, mid) > 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double u_half = 0.5 * (lo + hi);
  const double s = std::min(u_half * array.wavelength / array.spacing, 1.0);
  // Beams spaced two half-power offsets apart cross at -3 dB.
  return 2.0 * std::asin(s);
}

int min_beam_count(double sigma_max, int n_elements) {
  if (sigma_max <= 0.0) throw std::invalid_argument("min_beam_count: sigma_max must be positive");
  const int m = static_cast<int>(std::ceil(sigma_max * n_elements / 2.0));
  const int count = std::max(m, 1);
  if (count > n_elements) {
    throw std::invalid_argument("min_beam_count: spread needs more beams than array elements");
  }
  return count;
}

Beamformer heuristic_beamformer(double center_angle, int m_beams, const ArrayConfig& array) {
  if (m_beams < 1) throw std::invalid_argument("heuristic_beamformer: m_beams must be >= 1");
  const double delta = delta_phi_3db(array);
  std::vector<double> centers;
  centers.reserve(m_beams);
  if (m_beams % 2 == 1) {
    centers.push_back(center_angle);
    for (int i = 1; i <= (m_beams - 1) / 2; ++i) {
      centers.push_back(center_angle - i * delta);
      centers.push_back(center_angle + i * delta);
    }
  } else {
    for (int i = 1; i <= m_beams / 2; ++i) {
      const double off = (i - 0.5) * delta;
      centers.push_back(center_angle - off);
      centers.push_back(center_angle + off);
    }
  }
  std::sort(centers.begin(), centers.end());

  const int n = array.n_elements;
  Beamformer bf;
  bf.rf = CMat(n, m_beams);
  for (int j = 0; j < m_beams; ++j) {
    // constant-modulus analog column: sqrt(N) * steering vector
    bf.rf.col(j) = std::sqrt(static_cast<double>(n)) *
                   steering_vector(array, clamp_angle(centers[j]));
  }
  bf.bb = CMat::Identity(m_beams, m_beams) /
          std::sqrt(static_cast<double>(n) * m_beams);
  return bf;
}

Beamformer hybrid_decompose(const Beamformer& target, const CMat& lens, int m_rf,
                            bool one_bit) {
  if (m_rf < 1) throw std::invalid_argument("hybrid_decompose: m_rf must be >= 1");
  if (m_rf > lens.cols()) throw std::invalid_argument("hybrid_decompose: m_rf exceeds dictionary");
  const int n = static_cast<int>(lens.rows());
  const CMat f_target = target.composed();

  std::vector<int> selected;
  std::vector<bool> used(lens.cols(), false);
  CMat residual = f_target;
  CMat dict(n, 0);
  CMat bb;
  for (int it = 0; it < m_rf; ++it) {
    int best = -1;
    double best_corr = -1.0;
    for (int k = 0; k < lens.cols(); ++k) {
      if (used[k]) continue;
      const double corr = (lens.col(k).adjoint() * residual).squaredNorm();
      if (corr > best_corr) {
        best_corr = corr;
        best = k;
      }
    }
    used[best] = true;
    selected.push_back(best);
    dict.conservativeResize(Eigen::NoChange, dict.cols() + 1);
    dict.col(dict.cols() - 1) = lens.col(best);
    bb = dict.completeOrthogonalDecomposition().solve(f_target);
    residual = f_target - dict * bb;
  }

  Beamformer out;
  out.rf = dict;
  if (one_bit) {
    // Per column, quantize to {-1,+1} after the best common-phase rotation.
    for (int j = 0; j < out.rf.cols(); ++j) {
      CVec col = dict.col(j);
      CVec best_v;
      double best_corr = -1.0;
      for (int p = 0; p < 64; ++p) {
        const Complex rot = std::polar(1.0, kPi * p / 64.0);
        CVec v(n);
        for (int i = 0; i < n; ++i) {
          v(i) = (rot * col(i)).real() >= 0.0 ? 1.0 : -1.0;
        }
        const double corr = std::abs((v.adjoint() * col)(0));
        if (corr > best_corr) {
          best_corr = corr;
          best_v = v;
        }
      }
      out.rf.col(j) = best_v;
    }
    bb = out.rf.completeOrthogonalDecomposition().solve(f_target);
  }
  out.bb = bb;
  const double norm = out.composed().norm();
  if (norm > 0.0) out.bb /= norm;
  return out;
}

CMat beamspace_coefficients(const Beamformer& bf, const CMat& lens) {
  return lens.adjoint() * bf.composed() / static_cast<double>(lens.rows());
}

}  // namespace lenstrack
