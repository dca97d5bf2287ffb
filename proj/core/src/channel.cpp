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

#include "mcc/channel.hpp"

#include <cmath>
#include <string>

#include "mcc/error.hpp"

namespace mcc {
namespace {

void expect_shape(const Matrix& m, int rows, int cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(name) + " has shape " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

void expect_finite(const Matrix& m, const char* name) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::kNonFiniteEntry, std::string(name) + " contains a non-finite entry");
    }
  }
}

}  // namespace

ChannelSet ChannelSet::zeros(const Dimensions& d) {
  return {d, Matrix::Zero(d.n_pr, d.n_pt), Matrix::Zero(d.n_cr, d.n_pt),
          Matrix::Zero(d.n_pr, d.n_ct), Matrix::Zero(d.n_cr, d.n_ct)};
}

MacCovariances MacCovariances::zeros(const Dimensions& d) {
  return {Matrix::Zero(d.n_pr, d.n_pr), Matrix::Zero(d.n_cr, d.n_cr)};
}

ChannelSet validate(const ChannelSet& channels) {
  const Dimensions& d = channels.dims;
  if (d.n_pt < 1 || d.n_ct < 1 || d.n_pr < 1 || d.n_cr < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "antenna counts must all be at least 1");
  }
  expect_shape(channels.h_pp, d.n_pr, d.n_pt, "H_pp");
  expect_shape(channels.h_pc, d.n_cr, d.n_pt, "H_pc");
  expect_shape(channels.h_cp, d.n_pr, d.n_ct, "H_cp");
  expect_shape(channels.h_cc, d.n_cr, d.n_ct, "H_cc");
  expect_finite(channels.h_pp, "H_pp");
  expect_finite(channels.h_pc, "H_pc");
  expect_finite(channels.h_cp, "H_cp");
  expect_finite(channels.h_cc, "H_cc");
  return channels;
}

LiftedChannels lift(const ChannelSet& channels, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kNonPositiveAlpha, "alpha must be positive, got " + std::to_string(alpha));
  }
  const Dimensions& d = channels.dims;
  const double scale = 1.0 / std::sqrt(alpha);
  LiftedChannels out;
  out.dims = d;
  out.alpha = alpha;
  out.g.resize(d.n_pr, d.mac_dim());
  out.g << channels.h_pp, channels.h_cp * scale;
  out.k.resize(d.n_cr, d.mac_dim());
  out.k << Matrix::Zero(d.n_cr, d.n_pt), channels.h_cc * scale;
  return out;
}

void check_covariances(const LiftedChannels& lifted, const MacCovariances& covs) {
  if (covs.s1.rows() != lifted.g.rows() || covs.s1.cols() != lifted.g.rows() ||
      covs.s2.rows() != lifted.k.rows() || covs.s2.cols() != lifted.k.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "covariance shapes do not match the lifted channels");
  }
  if (linalg::hermitian_defect(covs.s1) > 1e-9 * (1.0 + covs.s1.cwiseAbs().maxCoeff()) ||
      linalg::hermitian_defect(covs.s2) > 1e-9 * (1.0 + covs.s2.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kNonPsdCovariance, "covariance is not Hermitian");
  }
  if (linalg::min_eigenvalue(covs.s1) < -kTolPsd || linalg::min_eigenvalue(covs.s2) < -kTolPsd) {
    throw Error(ErrorCode::kNonPsdCovariance, "covariance has a negative eigenvalue");
  }
}

EffectiveChannels effective_channels(const LiftedChannels& lifted, const MacCovariances& covs) {
  check_covariances(lifted, covs);
  const Eigen::Index m = lifted.g.cols();
  const Matrix ident = Matrix::Identity(m, m);
  const Matrix from_s2 = ident + lifted.k.adjoint() * covs.s2 * lifted.k;
  const Matrix from_s1 = ident + lifted.g.adjoint() * covs.s1 * lifted.g;
  return {lifted.g * linalg::psd_inverse_sqrt(from_s2), lifted.k * linalg::psd_inverse_sqrt(from_s1)};
}

double objective(const LiftedChannels& lifted, const MacCovariances& covs) {
  check_covariances(lifted, covs);
  const Eigen::Index m = lifted.g.cols();
  const Matrix total = Matrix::Identity(m, m) + lifted.g.adjoint() * covs.s1 * lifted.g +
                       lifted.k.adjoint() * covs.s2 * lifted.k;
  return linalg::log_det_hpd(total);
}

}  // namespace mcc
