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
#include <random>

#include "mcc/channel.hpp"

namespace mcc {

/// Portable standard-normal source: std::mt19937_64 (fully specified by the standard)
/// feeding 53-bit uniforms into the Box-Muller transform. Unlike
/// std::normal_distribution, the output sequence is identical across standard libraries.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double next();
  /// Uniform on [0, 1).
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Matrix with independent N(0,1) entries, or CN(0,1) entries (parts scaled by 1/sqrt 2).
Matrix random_matrix(NormalSource& rng, int rows, int cols, bool complex_entries);

/// Channel set with i.i.d. entries drawn in the order H_pp, H_pc, H_cp, H_cc, row-major.
ChannelSet random_channels(NormalSource& rng, const Dimensions& dims, bool complex_entries);

/// X X^H for a square complex Gaussian X, scaled to the requested trace.
Matrix random_psd(NormalSource& rng, int n, double trace);

}  // namespace mcc
