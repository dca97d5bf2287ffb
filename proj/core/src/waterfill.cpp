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

#include "mcc/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcc/error.hpp"

namespace mcc {
namespace {

std::vector<Mode> modes_of(const Matrix& h) {
  std::vector<Mode> out;
  if (h.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(h * h.adjoint()));
  const Eigen::Index n = es.eigenvalues().size();
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    out.push_back({std::max(es.eigenvalues()(i), 0.0), es.eigenvectors().col(i)});
  }
  return out;
}

double max_gain(const std::vector<Mode>& a, const std::vector<Mode>& b) {
  double g = 0.0;
  for (const Mode& m : a) g = std::max(g, m.gain);
  for (const Mode& m : b) g = std::max(g, m.gain);
  return g;
}

// Modes below this fraction of the strongest gain are numerically zero.
constexpr double kRelativeGainFloor = 1e-12;

bool usable(double gain, double strongest) {
  return gain > 0.0 && gain > kRelativeGainFloor * strongest;
}

Matrix assemble(const std::vector<Mode>& modes, const double* powers, Eigen::Index n) {
  Matrix s = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (powers[i] > 0.0) s += powers[i] * modes[i].basis * modes[i].basis.adjoint();
  }
  return linalg::hermitian_part(s);
}

MacCovariances mix(const MacCovariances& old, const MacCovariances& fresh, double theta) {
  if (theta >= 1.0) return fresh;
  return {linalg::hermitian_part((1.0 - theta) * old.s1 + theta * fresh.s1),
          linalg::hermitian_part((1.0 - theta) * old.s2 + theta * fresh.s2)};
}

}  // namespace

ModeSet eigenmodes(const EffectiveChannels& eff) { return {modes_of(eff.g), modes_of(eff.k)}; }

WaterLevel water_level(std::span<const double> inverse_gains, double power) {
  if (inverse_gains.empty()) throw Error(ErrorCode::kEmptyModeList, "water_level needs at least one mode");
  if (!(power > 0.0)) throw Error(ErrorCode::kConfigInvalid, "water_level needs a positive power");

  std::vector<double> sorted(inverse_gains.begin(), inverse_gains.end());
  std::sort(sorted.begin(), sorted.end());

  // Largest active set whose level clears its weakest member.
  double level = sorted.front() + power;
  double prefix = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  for (std::size_t k = sorted.size(); k >= 1; --k) {
    const double candidate = (power + prefix) / static_cast<double>(k);
    if (candidate > sorted[k - 1]) {
      level = candidate;
      break;
    }
    prefix -= sorted[k - 1];
  }

  WaterLevel out{level, {}};
  out.allocations.reserve(inverse_gains.size());
  for (double c : inverse_gains) out.allocations.push_back(std::max(level - c, 0.0));
  return out;
}

SingleUserWaterfill single_user_waterfill(const Matrix& h, double power) {
  const std::vector<Mode> modes = modes_of(h);
  const double strongest = max_gain(modes, {});
  std::vector<double> inverse;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (usable(modes[i].gain, strongest)) {
      inverse.push_back(1.0 / modes[i].gain);
      index.push_back(i);
    }
  }
  SingleUserWaterfill out;
  if (inverse.empty()) {
    out.covariance = Matrix::Zero(h.rows(), h.rows());
    out.zero_channel = true;
    return out;
  }
  const WaterLevel wl = water_level(inverse, power);
  std::vector<double> powers(modes.size(), 0.0);
  for (std::size_t j = 0; j < index.size(); ++j) powers[index[j]] = wl.allocations[j];
  out.covariance = assemble(modes, powers.data(), h.rows());
  out.level = wl.level;
  return out;
}

WaterfillResult joint_waterfill(const EffectiveChannels& eff, double total_power) {
  if (!(total_power > 0.0)) throw Error(ErrorCode::kConfigInvalid, "joint_waterfill needs a positive power");
  WaterfillResult out;
  out.modes = eigenmodes(eff);
  const std::size_t n1 = out.modes.primary.size();
  const std::size_t n2 = out.modes.cognitive.size();
  const double strongest = max_gain(out.modes.primary, out.modes.cognitive);

  std::vector<double> inverse;
  std::vector<std::size_t> index;  // into the pooled primary-then-cognitive list
  for (std::size_t i = 0; i < n1 + n2; ++i) {
    const double gain = i < n1 ? out.modes.primary[i].gain : out.modes.cognitive[i - n1].gain;
    if (usable(gain, strongest)) {
      inverse.push_back(1.0 / gain);
      index.push_back(i);
    }
  }
  if (inverse.empty()) {
    throw Error(ErrorCode::kAllModesZero, "both effective channels are zero; nothing to waterfill");
  }

  const WaterLevel wl = water_level(inverse, total_power);
  out.level = wl.level;
  out.allocations.assign(n1 + n2, 0.0);
  for (std::size_t j = 0; j < index.size(); ++j) out.allocations[index[j]] = wl.allocations[j];

  out.covariances.s1 = assemble(out.modes.primary, out.allocations.data(), eff.g.rows());
  out.covariances.s2 = assemble(out.modes.cognitive, out.allocations.data() + n1, eff.k.rows());
  return out;
}

bool satisfies_kkt(const WaterfillResult& result, double total_power, double tol) {
  const std::size_t n1 = result.modes.primary.size();
  double used = 0.0;
  for (std::size_t i = 0; i < result.allocations.size(); ++i) {
    const double lambda = result.allocations[i];
    const double gain = i < n1 ? result.modes.primary[i].gain : result.modes.cognitive[i - n1].gain;
    if (lambda < 0.0) return false;
    used += lambda;
    if (lambda > 0.0) {
      if (std::abs(lambda + 1.0 / gain - result.level) > tol * std::max(1.0, result.level)) return false;
    } else if (gain > 0.0 && 1.0 / gain < result.level - tol * std::max(1.0, result.level)) {
      // An inactive mode below the water line would be worth filling; only numerically
      // zero gains may sit there.
      const double strongest = max_gain(result.modes.primary, result.modes.cognitive);
      if (usable(gain, strongest)) return false;
    }
  }
  return std::abs(used - total_power) <= tol * std::max(1.0, total_power);
}

InnerMaxResult inner_max(const LiftedChannels& lifted, double total_power, const MacCovariances& start,
                         const InnerOptions& options) {
  if (!(total_power > 0.0)) throw Error(ErrorCode::kConfigInvalid, "inner_max needs a positive power");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "damping must lie in (0, 1]");
  }
  check_covariances(lifted, start);

  InnerMaxResult out;
  MacCovariances current = start;
  const double start_trace = start.total_trace();
  if (start_trace > 0.0) current = start.scaled(total_power / start_trace);
  double value = objective(lifted, current);
  double theta = options.damping;

  const int max_passes = options.mode == InnerMode::kOnce ? 1 : std::max(1, options.max_iterations);
  for (int pass = 1; pass <= max_passes; ++pass) {
    const WaterfillResult wf = joint_waterfill(effective_channels(lifted, current), total_power);
    MacCovariances candidate = mix(current, wf.covariances, theta);
    double candidate_value = objective(lifted, candidate);

    if (options.mode == InnerMode::kToConvergence && candidate_value < value - 1e-12) {
      if (theta > 0.5) {
        theta = 0.5;
        out.damped = true;
        candidate = mix(current, wf.covariances, theta);
        candidate_value = objective(lifted, candidate);
      }
      if (candidate_value < value - 1e-12) break;  // no ascent left at this precision
    }

    const double improvement = candidate_value - value;
    current = std::move(candidate);
    value = candidate_value;
    out.history.push_back(value);
    out.passes = pass;
    if (options.mode == InnerMode::kToConvergence && improvement < options.tol) break;
  }

  out.covariances = std::move(current);
  out.objective = value;
  return out;
}

}  // namespace mcc
