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

#include <span>
#include <vector>

#include "mcc/channel.hpp"

namespace mcc {

enum class DualUser { kPrimary, kCognitive };

/// One eigenmode of a dual user's effective channel: gain sigma^2 and the matching
/// unit-norm direction in that user's covariance space.
struct Mode {
  double gain = 0.0;
  Vector basis;
};

/// Per-user eigenmodes, each list sorted by descending gain.
struct ModeSet {
  std::vector<Mode> primary;
  std::vector<Mode> cognitive;

  const std::vector<Mode>& of(DualUser user) const {
    return user == DualUser::kPrimary ? primary : cognitive;
  }
};

/// Eigenpairs of g_eff g_eff^H and k_eff k_eff^H.
ModeSet eigenmodes(const EffectiveChannels& eff);

/// Water level and the per-mode powers max(level - 1/gain, 0), in input order.
struct WaterLevel {
  double level = 0.0;
  std::vector<double> allocations;
};

/// Solves sum_i max(K - c_i, 0) = power for K, where c_i = 1/gain_i are the inverse
/// mode gains. Throws Error(kEmptyModeList) on an empty list.
WaterLevel water_level(std::span<const double> inverse_gains, double power);

struct SingleUserWaterfill {
  Matrix covariance;
  double level = 0.0;
  bool zero_channel = false;
};

/// Maximizes log det(I + H^H S H) over tr(S) <= power. S lives in the row space of H,
/// so its eigenvectors are the left singular vectors of H.
SingleUserWaterfill single_user_waterfill(const Matrix& h, double power);

struct WaterfillResult {
  double level = 0.0;
  ModeSet modes;
  /// Powers for modes.primary followed by modes.cognitive.
  std::vector<double> allocations;
  MacCovariances covariances;
};

/// Pools the modes of both effective channels and waterfills them against a single
/// sum-power budget. Throws Error(kAllModesZero) if neither channel has a usable mode.
WaterfillResult joint_waterfill(const EffectiveChannels& eff, double total_power);

/// Checks the level/active-set conditions and full power use of a waterfill result.
bool satisfies_kkt(const WaterfillResult& result, double total_power, double tol = 1e-10);

enum class InnerMode { kOnce, kToConvergence };

struct InnerOptions {
  InnerMode mode = InnerMode::kToConvergence;
  double tol = 1e-10;
  int max_iterations = 1000;
  /// Mixing weight of the fresh waterfill against the previous iterate.
  double damping = 1.0;
};

struct InnerMaxResult {
  MacCovariances covariances;
  double objective = 0.0;
  int passes = 0;
  bool damped = false;
  /// Objective after each accepted pass.
  std::vector<double> history;
};

/// Sum-power iterative waterfilling for the inner maximization at fixed alpha.
/// `start` is rescaled to the full budget before the first pass.
InnerMaxResult inner_max(const LiftedChannels& lifted, double total_power,
                         const MacCovariances& start, const InnerOptions& options = {});

}  // namespace mcc
