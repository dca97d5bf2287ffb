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
#include <string_view>
#include <vector>

#include "mcc/channel.hpp"
#include "mcc/waterfill.hpp"

namespace mcc {

/// Outer-update rule: 1 solves the alpha subproblem exactly, 2 takes one Newton descent step.
enum class Algorithm { kExact = 1, kNewton = 2 };

struct SolverConfig {
  double p_primary = 1.0;
  double p_cognitive = 1.0;
  Algorithm algorithm = Algorithm::kExact;
  InnerMode inner_mode = InnerMode::kOnce;
  double alpha_init = 1.0;
  double alpha_min = 1e-6;
  double alpha_max = 1e6;
  double tol_alpha = 1e-8;
  double tol_rate = 1e-9;
  int max_outer = 500;
  int stall_window = 50;
  double damping = 1.0;
  std::uint64_t seed = 1;

  /// Throws Error(kConfigInvalid) describing the first violated constraint.
  void validate() const;

  /// P_p + alpha P_c.
  double budget(double alpha) const { return p_primary + alpha * p_cognitive; }
};

/// Trial point of the alpha subproblem: covariances computed at alpha_prev are
/// rescaled by gamma so they meet the budget at beta.
struct AlphaSearchState {
  double alpha_prev = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  static AlphaSearchState make(const SolverConfig& config, double alpha_prev, double beta);
};

/// g(beta) = log det(I + G_beta^H (gamma S1) G_beta + K_beta^H (gamma S2) K_beta).
double alpha_objective(const ChannelSet& channels, const MacCovariances& covs, double alpha_prev,
                       double beta, const SolverConfig& config);

struct AlphaDerivatives {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;
};

/// g, dg/dbeta and d2g/dbeta2 from the trace identities
/// d log|M| = tr(M^-1 dM) and d2 log|M| = tr(M^-1 d2M) - tr(M^-1 dM M^-1 dM).
AlphaDerivatives alpha_objective_derivatives(const ChannelSet& channels,
                                             const MacCovariances& covs, double alpha_prev,
                                             double beta, const SolverConfig& config);

struct AlphaUpdate {
  double alpha = 1.0;
  bool at_boundary = false;
  bool flat = false;
  /// Newton only: curvature was not positive and the fixed-fraction probe was used.
  bool fallback = false;
  /// Exact only: number of local minima seen in the bracketing scan.
  int scan_minima = 0;
};

/// Global minimizer of g over [alpha_min, alpha_max]: 64-point log scan, golden section
/// in log(beta), then bisection on the sign of dg/dbeta inside the final bracket.
AlphaUpdate minimize_alpha_exact(const ChannelSet& channels, const MacCovariances& covs,
                                 double alpha_prev, const SolverConfig& config);

/// One safeguarded Newton step on g from alpha_prev. Never increases g.
AlphaUpdate newton_alpha_step(const ChannelSet& channels, const MacCovariances& covs,
                              double alpha_prev, const SolverConfig& config);

struct IterationRecord {
  int iteration = 0;
  double alpha = 0.0;
  double sum_rate = 0.0;  // nats
  double trace_s1 = 0.0;
  double trace_s2 = 0.0;
  double delta_alpha = 0.0;
  double delta_rate = 0.0;
  int inner_passes = 0;
  int scan_minima = 0;
};

class IterationTrace {
 public:
  /// Throws std::logic_error unless record.iteration exceeds the last stored iteration.
  void append(const IterationRecord& record);

  const std::vector<IterationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const IterationRecord& back() const { return records_.back(); }

 private:
  std::vector<IterationRecord> records_;
};

enum class SolveStatus { kConverged, kMaxIterations, kStalled, kBoundaryAlpha };

std::string_view to_string(SolveStatus status);

struct SaddleResiduals {
  /// Largest objective gain from feasible covariance perturbations at alpha*.
  double max_ascent_gain = 0.0;
  /// Largest objective drop from moving alpha by +-1%.
  double max_descent_gain = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kMaxIterations;
  double alpha_star = 1.0;
  /// Feasible at the alpha_star budget.
  MacCovariances covariances;
  double sum_rate = 0.0;  // nats
  IterationTrace trace;
  SaddleResiduals residuals;
  int iterations = 0;
};

/// Alternates one inner update with one alpha update until (alpha, rate) settle.
SolveResult run_algorithm(const ChannelSet& channels, const SolverConfig& config);

/// Perturbation probes around a candidate saddle point.
SaddleResiduals saddle_probes(const ChannelSet& channels, double alpha,
                              const MacCovariances& covs, const SolverConfig& config,
                              int covariance_probes = 50);

/// Factorization F(alpha) = c + log det(I + A / alpha) of the objective at fixed covariances.
struct CurvatureCertificate {
  double c = 0.0;
  Matrix a;  // n_ct x n_ct, Hermitian PSD
  RealVector eigenvalues;

  double evaluate(double alpha) const;
};

/// c = log det(I + H_pp^H S1 H_pp) and the Schur complement
/// A = H_cp^H S1 H_cp + H_cc^H S2 H_cc - H_cp^H S1 H_pp (I + H_pp^H S1 H_pp)^-1 H_pp^H S1 H_cp.
CurvatureCertificate curvature_certificate(const ChannelSet& channels, const MacCovariances& covs);

/// d2F/dalpha2 = tr[(A/a^3)(I + A/a)^-1 (2I + A/a)(I + A/a)^-1].
double second_derivative_alpha(const CurvatureCertificate& cert, double alpha);

}  // namespace mcc
