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

#include "mcc/channel.hpp"

namespace mcc {

/// Downlink covariances in the lifted coordinates. q_c is the cognitive signal's full
/// m x m covariance; sigma_cc is its lower-right n_ct x n_ct block.
struct BcCovariances {
  Matrix q_p;
  Matrix q_c;
  Matrix sigma_cc;

  double total_trace() const { return linalg::real_trace(q_p) + linalg::real_trace(q_c); }

  /// Largest entry of q_c outside its cognitive-antenna block. Zero when the cognitive
  /// signal is carried by the cognitive transmitter alone.
  double leakage() const;

  /// Embeds sigma_cc as blockdiag(0, sigma_cc) and uses it for q_c.
  static BcCovariances structured(const Matrix& q_p, const Matrix& sigma_cc);
};

/// Maps dual-MAC covariances onto downlink covariances with the same total power and the
/// same sum rate. The primary signal is encoded first and sees the cognitive signal as
/// noise; the cognitive signal is encoded last and is interference-free.
/// MAC power no channel can see is placed on the first primary antenna, split between the
/// two signals so that the sum rate is unchanged.
BcCovariances mac_to_bc(const LiftedChannels& lifted, const MacCovariances& covs);

struct RatePair {
  double primary = 0.0;    // nats
  double cognitive = 0.0;  // nats

  double sum() const { return primary + cognitive; }
};

/// R_p = log|I + G(Q_p + Q_c)G^H| - log|I + G Q_c G^H|,  R_c = log|I + K Q_c K^H|
/// with G, K lifted at alpha. When q_c is block-structured G Q_c G^H reduces to
/// H_cp Sigma_cc H_cp^H / alpha.
RatePair bc_rates(const ChannelSet& channels, double alpha, const BcCovariances& bc);

/// Transmit covariances in the original (unlifted) coordinates.
struct TransmitPolicy {
  Matrix sigma_p_net;  // D Q_p D, (n_pt + n_ct) square
  Matrix sigma_p;      // upper-left block
  Matrix sigma_cp;     // lower-right block
  Matrix cross;        // Q, upper-right block
  Matrix cognitive_net;   // D Q_c D
  Matrix sigma_cc;        // lower-right block of cognitive_net, sigma_cc / alpha
  double primary_power = 0.0;    // tr(Sigma_p)
  double cognitive_power = 0.0;  // tr(Sigma_cp) + tr(Sigma_cc)
  /// Power radiated from each transmitter's antennas by both signals together.
  double primary_antenna_power = 0.0;
  double cognitive_antenna_power = 0.0;
};

/// Undoes the alpha-lifting with D = blockdiag(I_{n_pt}, I_{n_ct} / sqrt(alpha)).
TransmitPolicy extract_policy(const BcCovariances& bc, double alpha);

/// Rates in original coordinates:
///   R_p = log|I + G Sigma_p,net G^H + G C G^H| - log|I + G C G^H|,  R_c = log|I + H_cc Sigma_cc H_cc^H|
/// with G = [H_pp | H_cp] and C the cognitive_net covariance.
RatePair policy_rates(const ChannelSet& channels, const TransmitPolicy& policy);

}  // namespace mcc
