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

#include <optional>
#include <vector>

#include "mcc/channel.hpp"

namespace mcc {

struct OracleConfig {
  double grid_min = 1e-3;
  double grid_max = 1e3;
  int grid_count = 2000;
  int refine_rounds = 3;
  double zoom = 10.0;
  double pg_step = 1.0;
  double pg_tol = 1e-10;
  int pg_max_iterations = 20000;
  bool keep_grid = false;

  void validate() const;
};

struct ReferenceMax {
  MacCovariances covariances;
  double objective = 0.0;
  /// Frank-Wolfe duality gap at the returned point; bounds the distance to the optimum.
  double gap = 0.0;
  int iterations = 0;
  bool step_collapse = false;
  std::vector<double> history;
};

/// Projected gradient ascent on log det(I + G^H S1 G + K^H S2 K) over
/// {S1, S2 PSD, tr S1 + tr S2 <= total_power}. Independent of the waterfilling code.
ReferenceMax inner_max_reference(const LiftedChannels& lifted, double total_power,
                                 const OracleConfig& cfg = {},
                                 const std::optional<MacCovariances>& warm_start = std::nullopt);

struct GridPoint {
  double alpha = 0.0;
  double value = 0.0;
};

struct OracleResult {
  double alpha_star = 0.0;
  double sum_rate = 0.0;  // nats
  std::vector<GridPoint> grid;  // filled when cfg.keep_grid
  int iterations = 0;           // total projected-gradient iterations
  int unimodality_violations = 0;
  int widenings = 0;
};

/// Brute-force min over a log grid of alpha of the reference inner maximum, with local
/// zoomed refinement around the best grid point.
OracleResult grid_minmax(const ChannelSet& channels, double p_primary, double p_cognitive,
                         const OracleConfig& cfg = {});

}  // namespace mcc
