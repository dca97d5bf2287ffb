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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "mcc/channel.hpp"
#include "mcc/saddle.hpp"

namespace mcc::cli {

/// Exit statuses shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

struct SolveOptions {
  std::string channels;
  double pp = 0.0;
  double pc = 0.0;
  int algorithm = 1;
  std::string inner = "once";
  std::optional<double> tol_alpha;
  std::optional<double> tol_rate;
  std::optional<int> max_iter;
  std::optional<double> alpha_init;
  std::string out;
  std::string format = "csv";
  std::string policy_out;
};

struct CompareOptions {
  SolveOptions solve;
  int grid_count = 2000;
};

struct GenOptions {
  std::uint64_t seed = 0;
  std::string dims;
  bool complex_entries = false;
  std::string out;
};

struct ConvexityOptions {
  std::string channels;
  std::string dims = "2,2,2,2";
  int samples = 100;
  std::uint64_t seed = 1;
  double pp = 5.0;
  double pc = 5.0;
};

SolverConfig make_config(const SolveOptions& opts, int algorithm);

/// "n_pt,n_ct,n_pr,n_cr". Throws Error(kDimensionMismatch) or Error(kParse).
Dimensions parse_dims(const std::string& text);

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check_convexity(const ConvexityOptions& opts, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mcc::cli
