// SPDX-License-Identifier: Apache-2.0
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

#pragma once

// Shared instances and brute-force helpers for the test suites. Nothing here calls into
// the library's numerics, so values computed with these helpers are independent checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "mcc/channel.hpp"
#include "mcc/random.hpp"

namespace mcc::test {

/// Single-antenna transmitters, two-antenna receivers. H_pc does not enter any rate.
inline ChannelSet reference_instance() {
  ChannelSet ch;
  ch.dims = {1, 1, 2, 2};
  ch.h_pp = Matrix(2, 1);
  ch.h_pp << -0.4326, 0.1253;
  ch.h_pc = Matrix::Zero(2, 1);
  ch.h_cp = Matrix(2, 1);
  ch.h_cp << -1.6656, 0.2877;
  ch.h_cc = Matrix(2, 1);
  ch.h_cc << -1.1465, 1.1909;
  return ch;
}

/// Determinant by Gaussian elimination with partial pivoting.
inline Complex brute_det(Matrix a) {
  const Eigen::Index n = a.rows();
  Complex det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index pivot = c;
    for (Eigen::Index r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    if (std::abs(a(pivot, c)) == 0.0) return 0.0;
    if (pivot != c) {
      a.row(pivot).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) {
      const Complex f = a(r, c) / a(c, c);
      for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

inline double brute_log_det(const Matrix& a) { return std::log(std::abs(brute_det(a))); }

/// log det(I + G^H S1 G + K^H S2 K) built from the raw channel blocks at alpha.
inline double brute_objective(const ChannelSet& ch, double alpha, const Matrix& s1, const Matrix& s2) {
  const int m = ch.dims.n_pt + ch.dims.n_ct;
  Matrix g(ch.dims.n_pr, m);
  Matrix k = Matrix::Zero(ch.dims.n_cr, m);
  g << ch.h_pp, ch.h_cp / std::sqrt(alpha);
  k.rightCols(ch.dims.n_ct) = ch.h_cc / std::sqrt(alpha);
  return brute_log_det(Matrix::Identity(m, m) + g.adjoint() * s1 * g + k.adjoint() * s2 * k);
}

/// Single-user capacity max log det(I + H^H S H), tr S <= p, by bisection on the water level
/// over the eigenvalues of H H^H.
inline double brute_single_user_capacity(const Matrix& h, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h * h.adjoint());
  std::vector<double> gains;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > 1e-12) gains.push_back(es.eigenvalues()(i));
  }
  if (gains.empty() || p <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = p + 1.0 / *std::min_element(gains.begin(), gains.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double used = 0.0;
    for (double g : gains) used += std::max(mid - 1.0 / g, 0.0);
    (used > p ? hi : lo) = mid;
  }
  double rate = 0.0;
  for (double g : gains) rate += std::log1p(g * std::max(lo - 1.0 / g, 0.0));
  return rate;
}

inline bool is_psd(const Matrix& a, double tol = 1e-9) {
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > tol * (1.0 + a.cwiseAbs().maxCoeff())) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().size() == 0 || es.eigenvalues().minCoeff() >= -tol;
}

/// Random dimensions with every count in [1, max_dim].
inline Dimensions random_dims(NormalSource& rng, int max_dim) {
  auto draw = [&] { return 1 + static_cast<int>(rng.uniform() * max_dim); };
  Dimensions d;
  d.n_pt = draw();
  d.n_ct = draw();
  d.n_pr = draw();
  d.n_cr = draw();
  return d;
}

}  // namespace mcc::test
