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

#include <complex>

#include <Eigen/Dense>

namespace mcc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace linalg {

/// (M + M^H) / 2.
Matrix hermitian_part(const Matrix& m);

/// max |M - M^H| entrywise.
double hermitian_defect(const Matrix& m);

/// Eigenvalues (ascending) of the Hermitian part of `m`.
RealVector hermitian_eigenvalues(const Matrix& m);

double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

/// Unique PSD square root; negative eigenvalues are floored at zero.
Matrix psd_sqrt(const Matrix& m);

/// Inverse of the PSD square root. Requires a positive definite argument.
Matrix psd_inverse_sqrt(const Matrix& m);

/// log det of a Hermitian positive definite matrix via Cholesky.
double log_det_hpd(const Matrix& m);

/// Real part of trace(A^H B), the Frobenius inner product on Hermitian matrices.
double inner(const Matrix& a, const Matrix& b);

double real_trace(const Matrix& m);

}  // namespace linalg
}  // namespace mcc
