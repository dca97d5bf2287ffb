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

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcc/duality.hpp"
#include "mcc/saddle.hpp"

namespace mcc::cli {

inline constexpr const char* kTraceHeader =
    "iter,alpha,sum_rate_nats,sum_rate_bits,tr_S1,tr_S2,delta_alpha,delta_rate";

struct TraceRow {
  int iter = 0;
  double alpha = 0.0;
  double sum_rate_nats = 0.0;
  double sum_rate_bits = 0.0;
  double tr_s1 = 0.0;
  double tr_s2 = 0.0;
  double delta_alpha = 0.0;
  double delta_rate = 0.0;
};

double nats_to_bits(double nats);

std::vector<TraceRow> trace_rows(const IterationTrace& trace);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
nlohmann::json trace_json(const std::vector<TraceRow>& rows);

/// Full result document for `mcc solve --policy-out`.
nlohmann::json result_document(const ChannelSet& channels, const SolverConfig& config, const SolveResult& result);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

struct ConvexityTally {
  int checked = 0;
  int passed = 0;
  double worst_min_eigenvalue = std::numeric_limits<double>::infinity();
  double worst_second_derivative = 0.0;
  double worst_relative_fd_error = 0.0;
};

/// Certificate checks on a 50-point log grid of alpha in [1e-3, 1e3]: A PSD to 1e-9, the
/// curvature formula nonnegative to 1e-10 and within relative 1e-4 of a central second
/// difference of log det(I + A/alpha) with step 1e-4 alpha.
bool check_certificate(const CurvatureCertificate& cert, ConvexityTally& tally);

}  // namespace mcc::cli
