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

#include "mcc/duality.hpp"

#include <algorithm>
#include <cmath>

#include "mcc/error.hpp"

namespace mcc {
namespace {

// Unitary-like factor U V^H of the thin SVD X = U S V^H.
Matrix polar_factor(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double log_det_plus_identity(const Matrix& m) {
  return linalg::log_det_hpd(Matrix::Identity(m.rows(), m.cols()) + m);
}

}  // namespace

double BcCovariances::leakage() const {
  const Eigen::Index n_ct = sigma_cc.rows();
  const Eigen::Index n_pt = q_c.rows() - n_ct;
  if (n_pt <= 0) return 0.0;
  const double upper = q_c.topLeftCorner(n_pt, n_pt).cwiseAbs().maxCoeff();
  const double off = q_c.topRightCorner(n_pt, n_ct).cwiseAbs().maxCoeff();
  return std::max(upper, off);
}

BcCovariances BcCovariances::structured(const Matrix& q_p, const Matrix& sigma_cc) {
  const Eigen::Index m = q_p.rows();
  const Eigen::Index n_ct = sigma_cc.rows();
  BcCovariances out{q_p, Matrix::Zero(m, m), sigma_cc};
  out.q_c.bottomRightCorner(n_ct, n_ct) = sigma_cc;
  return out;
}

BcCovariances mac_to_bc(const LiftedChannels& lifted, const MacCovariances& covs) {
  check_covariances(lifted, covs);
  const Matrix& g = lifted.g;
  const Matrix& k = lifted.k;
  const Eigen::Index m = g.cols();
  const Eigen::Index n_ct = lifted.dims.n_ct;

  // Cognitive signal first: it is decoded first in the MAC (interference S1) and
  // encoded last in the BC (no interference).
  const Matrix mac_noise = Matrix::Identity(m, m) + g.adjoint() * covs.s1 * g;
  const Matrix mac_whiten = linalg::psd_inverse_sqrt(mac_noise);
  const Matrix f2 = polar_factor(mac_whiten * k.adjoint());
  const Matrix q_c = linalg::hermitian_part(mac_whiten * f2 * covs.s2 * f2.adjoint() * mac_whiten);

  // Primary signal: decoded last in the MAC, sees the cognitive signal as BC noise.
  const Matrix bc_noise = Matrix::Identity(g.rows(), g.rows()) + g * q_c * g.adjoint();
  const Matrix bc_root = linalg::psd_sqrt(bc_noise);
  const Matrix f1 = polar_factor(g.adjoint() * linalg::psd_inverse_sqrt(bc_noise));
  Matrix q_p = linalg::hermitian_part(f1 * bc_root * covs.s1 * bc_root * f1.adjoint());
  Matrix q_c_out = q_c;

  // MAC power outside the channels' reach (rank-deficient or tall G, K) has no image above.
  // Re-radiate it on the first primary antenna u, which K never sees: x goes to the cognitive
  // signal and the rest to the primary one. With w = G u, N = I + G(Q_p + Q_c)G^H and
  // D = I + G Q_c G^H, the determinant lemma keeps the sum rate when
  // x w^H D^-1 w = lost * w^H N^-1 w.
  const double lost = covs.total_trace() - linalg::real_trace(q_p) - linalg::real_trace(q_c);
  if (lost > 1e-13 * (1.0 + covs.total_trace())) {
    const Vector w = g.col(0);
    double x = 0.0;
    if (w.norm() > 0.0) {
      const Matrix n_mat = bc_noise + g * q_p * g.adjoint();
      const double through_n = std::real(w.dot(n_mat.llt().solve(w)));
      const double through_d = std::real(w.dot(bc_noise.llt().solve(w)));
      x = std::clamp(lost * through_n / through_d, 0.0, lost);
    }
    q_p(0, 0) += lost - x;
    q_c_out(0, 0) += x;
  }

  // K has a zero left block, so only q_c's lower-right block reaches the cognitive receiver.
  return {q_p, q_c_out, q_c_out.bottomRightCorner(n_ct, n_ct)};
}

RatePair bc_rates(const ChannelSet& channels, double alpha, const BcCovariances& bc) {
  const LiftedChannels lifted = lift(channels, alpha);
  const Matrix& g = lifted.g;
  const Matrix interference = g * bc.q_c * g.adjoint();
  RatePair out;
  out.primary = log_det_plus_identity(interference + g * bc.q_p * g.adjoint()) -
                log_det_plus_identity(interference);
  out.cognitive = log_det_plus_identity(lifted.k * bc.q_c * lifted.k.adjoint());
  return out;
}

TransmitPolicy extract_policy(const BcCovariances& bc, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kNonPositiveAlpha, "alpha must be positive");
  const Eigen::Index m = bc.q_p.rows();
  const Eigen::Index n_ct = bc.sigma_cc.rows();
  const Eigen::Index n_pt = m - n_ct;

  Eigen::VectorXd scale = Eigen::VectorXd::Ones(m);
  scale.tail(n_ct).setConstant(1.0 / std::sqrt(alpha));
  const auto d = scale.cast<Complex>().asDiagonal();

  TransmitPolicy out;
  out.sigma_p_net = d * bc.q_p * d;
  out.sigma_p = out.sigma_p_net.topLeftCorner(n_pt, n_pt);
  out.sigma_cp = out.sigma_p_net.bottomRightCorner(n_ct, n_ct);
  out.cross = out.sigma_p_net.topRightCorner(n_pt, n_ct);
  out.cognitive_net = d * bc.q_c * d;
  out.sigma_cc = out.cognitive_net.bottomRightCorner(n_ct, n_ct);
  out.primary_power = linalg::real_trace(out.sigma_p);
  out.cognitive_power = linalg::real_trace(out.sigma_cp) + linalg::real_trace(out.sigma_cc);
  out.primary_antenna_power = out.primary_power + linalg::real_trace(out.cognitive_net.topLeftCorner(n_pt, n_pt));
  out.cognitive_antenna_power = out.cognitive_power;
  return out;
}

RatePair policy_rates(const ChannelSet& channels, const TransmitPolicy& policy) {
  Matrix g(channels.h_pp.rows(), channels.h_pp.cols() + channels.h_cp.cols());
  g << channels.h_pp, channels.h_cp;
  const Matrix interference = g * policy.cognitive_net * g.adjoint();
  RatePair out;
  out.primary = log_det_plus_identity(interference + g * policy.sigma_p_net * g.adjoint()) -
                log_det_plus_identity(interference);
  out.cognitive = log_det_plus_identity(channels.h_cc * policy.sigma_cc * channels.h_cc.adjoint());
  return out;
}

}  // namespace mcc
