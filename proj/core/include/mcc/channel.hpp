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

#include "mcc/linalg.hpp"

namespace mcc {

/// Validation slack for PSD and trace checks.
inline constexpr double kTolPsd = 1e-9;
inline constexpr double kTolTrace = 1e-9;

/// Antenna counts of the two transmitter/receiver pairs.
struct Dimensions {
  int n_pt = 1;  // primary transmit
  int n_ct = 1;  // cognitive transmit
  int n_pr = 1;  // primary receive
  int n_cr = 1;  // cognitive receive

  /// Receive dimension of the dual MAC, n_pt + n_ct.
  int mac_dim() const { return n_pt + n_ct; }

  friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// The four constant channel gain matrices. Receiver noise is unit-variance white,
/// so no noise covariance is stored.
struct ChannelSet {
  Dimensions dims;
  Matrix h_pp;  // n_pr x n_pt
  Matrix h_pc;  // n_cr x n_pt
  Matrix h_cp;  // n_pr x n_ct
  Matrix h_cc;  // n_cr x n_ct

  /// All-zero channels of the given shape.
  static ChannelSet zeros(const Dimensions& dims);
};

/// Channels scaled by the outer variable alpha:
///   g = [H_pp | H_cp / sqrt(alpha)],  k = [0 | H_cc / sqrt(alpha)].
struct LiftedChannels {
  Dimensions dims;
  double alpha = 1.0;
  Matrix g;  // n_pr x m
  Matrix k;  // n_cr x m
};

/// Dual-MAC transmit covariances. s1 belongs to the primary-dual user (n_pr x n_pr),
/// s2 to the cognitive-dual user (n_cr x n_cr).
struct MacCovariances {
  Matrix s1;
  Matrix s2;

  static MacCovariances zeros(const Dimensions& dims);

  double total_trace() const { return linalg::real_trace(s1) + linalg::real_trace(s2); }

  MacCovariances scaled(double factor) const { return {s1 * factor, s2 * factor}; }
};

struct EffectiveChannels {
  Matrix g;
  Matrix k;
};

/// Returns `channels` unchanged if every shape matches `dims` and every entry is finite.
/// Throws Error(kDimensionMismatch) naming the offending matrix, or Error(kNonFiniteEntry).
ChannelSet validate(const ChannelSet& channels);

/// Builds G_alpha and K_alpha. Throws Error(kNonPositiveAlpha) unless alpha > 0.
LiftedChannels lift(const ChannelSet& channels, double alpha);

/// Throws Error(kShapeMismatch) or Error(kNonPsdCovariance) when `covs` cannot be used with `lifted`.
void check_covariances(const LiftedChannels& lifted, const MacCovariances& covs);

/// Whitens each user's channel by the other user's contribution:
///   g_eff = G (I + K^H S2 K)^{-1/2},  k_eff = K (I + G^H S1 G)^{-1/2}.
EffectiveChannels effective_channels(const LiftedChannels& lifted, const MacCovariances& covs);

/// log det(I + G^H S1 G + K^H S2 K) in nats.
double objective(const LiftedChannels& lifted, const MacCovariances& covs);

}  // namespace mcc
