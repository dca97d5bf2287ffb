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

#include "mcc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mcc/error.hpp"

namespace mcc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kNonFiniteEntry: return "non-finite-entry";
    case ErrorCode::kNonPositiveAlpha: return "nonpositive-alpha";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kNonPsdCovariance: return "non-psd-covariance";
    case ErrorCode::kEmptyModeList: return "empty-mode-list";
    case ErrorCode::kAllModesZero: return "all-modes-zero";
    case ErrorCode::kConfigInvalid: return "config-invalid";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

namespace linalg {

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

double hermitian_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  if (m.size() == 0) return RealVector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& m) {
  RealVector ev = hermitian_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

double max_eigenvalue(const Matrix& m) {
  RealVector ev = hermitian_eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.maxCoeff();
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix& v = es.eigenvectors();
  return hermitian_part(v * root.cast<Complex>().asDiagonal() * v.adjoint());
}

Matrix psd_inverse_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  const RealVector& ev = es.eigenvalues();
  if (ev.size() > 0 && !(ev.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kNonPsdCovariance, "inverse square root of a singular matrix");
  }
  RealVector inv_root = ev.cwiseSqrt().cwiseInverse();
  const Matrix& v = es.eigenvectors();
  return hermitian_part(v * inv_root.cast<Complex>().asDiagonal() * v.adjoint());
}

double log_det_hpd(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(hermitian_part(m));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonPsdCovariance, "log-determinant of a non positive definite matrix");
  }
  const Matrix& l = llt.matrixLLT();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) sum += std::log(l(i, i).real());
  return 2.0 * sum;
}

double inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

double real_trace(const Matrix& m) { return m.size() == 0 ? 0.0 : m.trace().real(); }

}  // namespace linalg
}  // namespace mcc
