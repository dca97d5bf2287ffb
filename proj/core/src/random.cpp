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

#include "mcc/random.hpp"

#include <cmath>
#include <numbers>

namespace mcc {

double NormalSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double NormalSource::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Matrix random_matrix(NormalSource& rng, int rows, int cols, bool complex_entries) {
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (complex_entries) {
        const double re = rng.next() * std::numbers::sqrt2 / 2.0;
        const double im = rng.next() * std::numbers::sqrt2 / 2.0;
        out(i, j) = Complex(re, im);
      } else {
        out(i, j) = Complex(rng.next(), 0.0);
      }
    }
  }
  return out;
}

ChannelSet random_channels(NormalSource& rng, const Dimensions& dims, bool complex_entries) {
  ChannelSet out;
  out.dims = dims;
  out.h_pp = random_matrix(rng, dims.n_pr, dims.n_pt, complex_entries);
  out.h_pc = random_matrix(rng, dims.n_cr, dims.n_pt, complex_entries);
  out.h_cp = random_matrix(rng, dims.n_pr, dims.n_ct, complex_entries);
  out.h_cc = random_matrix(rng, dims.n_cr, dims.n_ct, complex_entries);
  return out;
}

Matrix random_psd(NormalSource& rng, int n, double trace) {
  const Matrix x = random_matrix(rng, n, n, true);
  Matrix p = linalg::hermitian_part(x * x.adjoint());
  const double t = linalg::real_trace(p);
  if (trace <= 0.0 || t <= 0.0) return Matrix::Zero(n, n);
  return p * (trace / t);
}

}  // namespace mcc
