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

#include "mcc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mcc/error.hpp"

// Brute-force references. Nothing here calls into the waterfilling or saddle code, and
// determinants go through LU rather than the Cholesky path used by objective().

namespace mcc {
namespace {

struct Pair {
  Matrix s1;
  Matrix s2;
};

double lu_log_det(const Matrix& m) {
  const Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& packed = lu.matrixLU();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < packed.rows(); ++i) sum += std::log(std::abs(packed(i, i)));
  return sum;
}

class InnerProblem {
 public:
  InnerProblem(const Matrix& g, const Matrix& k, double budget) : g_(g), k_(k), budget_(budget) {}

  Matrix system(const Pair& s) const {
    const Eigen::Index m = g_.cols();
    return Matrix::Identity(m, m) + g_.adjoint() * s.s1 * g_ + k_.adjoint() * s.s2 * k_;
  }

  double value(const Pair& s) const { return lu_log_det(system(s)); }

  Pair gradient(const Pair& s) const {
    const Matrix inv = system(s).partialPivLu().inverse();
    return {herm(g_ * inv * g_.adjoint()), herm(k_ * inv * k_.adjoint())};
  }

  // Euclidean projection onto {S1, S2 PSD, tr S1 + tr S2 <= budget}: pooled eigenvalues
  // are projected onto the capped simplex, eigenvectors are kept.
  Pair project(const Pair& y) const {
    Eigen::SelfAdjointEigenSolver<Matrix> e1(herm(y.s1));
    Eigen::SelfAdjointEigenSolver<Matrix> e2(herm(y.s2));
    const Eigen::Index n1 = e1.eigenvalues().size();
    const Eigen::Index n2 = e2.eigenvalues().size();
    std::vector<double> lam(static_cast<std::size_t>(n1 + n2));
    for (Eigen::Index i = 0; i < n1; ++i) lam[i] = e1.eigenvalues()(i);
    for (Eigen::Index i = 0; i < n2; ++i) lam[n1 + i] = e2.eigenvalues()(i);

    const double shift = simplex_shift(lam);
    for (double& l : lam) l = std::max(l - shift, 0.0);

    RealVector l1(n1), l2(n2);
    for (Eigen::Index i = 0; i < n1; ++i) l1(i) = lam[i];
    for (Eigen::Index i = 0; i < n2; ++i) l2(i) = lam[n1 + i];
    return {herm(e1.eigenvectors() * l1.cast<Complex>().asDiagonal() * e1.eigenvectors().adjoint()),
            herm(e2.eigenvectors() * l2.cast<Complex>().asDiagonal() * e2.eigenvectors().adjoint())};
  }

  // Upper bound on (optimum - value) from concavity: max over the feasible set of the
  // linearization, minus its value at s.
  double frank_wolfe_gap(const Pair& s, const Pair& grad) const {
    double top = 0.0;
    if (grad.s1.size() > 0) top = std::max(top, Eigen::SelfAdjointEigenSolver<Matrix>(grad.s1, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
    if (grad.s2.size() > 0) top = std::max(top, Eigen::SelfAdjointEigenSolver<Matrix>(grad.s2, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
    return budget_ * top - dot(grad, s);
  }

  static double dot(const Pair& a, const Pair& b) {
    return (a.s1.adjoint() * b.s1).trace().real() + (a.s2.adjoint() * b.s2).trace().real();
  }

 private:
  static Matrix herm(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

  double simplex_shift(std::vector<double> lam) const {
    double positive = 0.0;
    for (double l : lam) positive += std::max(l, 0.0);
    if (positive <= budget_) return 0.0;
    std::sort(lam.begin(), lam.end(), std::greater<>());
    double cumulative = 0.0;
    double shift = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
      cumulative += lam[k];
      const double candidate = (cumulative - budget_) / static_cast<double>(k + 1);
      if (lam[k] > candidate) shift = candidate;
    }
    return shift;
  }

  Matrix g_;
  Matrix k_;
  double budget_;
};

// Own copy of the alpha-lifting so grid_minmax does not depend on channel.cpp.
std::pair<Matrix, Matrix> lift_for_oracle(const ChannelSet& ch, double alpha) {
  const double s = 1.0 / std::sqrt(alpha);
  const Eigen::Index m = ch.dims.n_pt + ch.dims.n_ct;
  Matrix g(ch.dims.n_pr, m);
  Matrix k = Matrix::Zero(ch.dims.n_cr, m);
  g.leftCols(ch.dims.n_pt) = ch.h_pp;
  g.rightCols(ch.dims.n_ct) = ch.h_cp * s;
  k.rightCols(ch.dims.n_ct) = ch.h_cc * s;
  return {g, k};
}

ReferenceMax solve_inner(const Matrix& g, const Matrix& k, double budget, const OracleConfig& cfg,
                         const std::optional<MacCovariances>& warm) {
  const InnerProblem problem(g, k, budget);
  Pair s{Matrix::Zero(g.rows(), g.rows()), Matrix::Zero(k.rows(), k.rows())};
  if (warm) {
    const double t = warm->total_trace();
    if (t > 0.0) s = problem.project({warm->s1 * (budget / t), warm->s2 * (budget / t)});
  }

  ReferenceMax out;
  double f = problem.value(s);
  double step = cfg.pg_step;
  int small_steps = 0;
  out.history.push_back(f);
  for (int it = 0; it < cfg.pg_max_iterations; ++it) {
    const Pair grad = problem.gradient(s);
    out.gap = problem.frank_wolfe_gap(s, grad);
    if (out.gap <= 10.0 * cfg.pg_tol) break;

    bool accepted = false;
    Pair next;
    double f_next = f;
    while (step > 1e-300) {
      next = problem.project({s.s1 + step * grad.s1, s.s2 + step * grad.s2});
      const Pair delta{next.s1 - s.s1, next.s2 - s.s2};
      f_next = problem.value(next);
      const double model = f + InnerProblem::dot(grad, delta) - InnerProblem::dot(delta, delta) / (2.0 * step);
      if (f_next >= model) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.step_collapse = true;
      break;
    }
    const double improvement = f_next - f;
    s = std::move(next);
    f = std::max(f, f_next);
    out.history.push_back(f_next);
    out.iterations = it + 1;
    step *= 2.0;
    // Fixed point of the projected-gradient map, to within pg_tol per step.
    small_steps = improvement < cfg.pg_tol ? small_steps + 1 : 0;
    if (small_steps >= 2) {
      out.gap = problem.frank_wolfe_gap(s, problem.gradient(s));
      break;
    }
  }

  out.covariances = {s.s1, s.s2};
  out.objective = problem.value(s);
  return out;
}

bool all_zero(const ChannelSet& ch) {
  auto zero = [](const Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; };
  return zero(ch.h_pp) && zero(ch.h_cp) && zero(ch.h_cc);
}

}  // namespace

void OracleConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
  };
  require(grid_min > 0.0 && grid_min < grid_max, "oracle grid needs 0 < grid_min < grid_max");
  require(grid_count >= 2, "oracle grid needs at least 2 points");
  require(refine_rounds >= 0 && zoom > 1.0, "oracle refinement needs rounds >= 0 and zoom > 1");
  require(pg_step > 0.0 && pg_tol > 0.0 && pg_max_iterations >= 1, "oracle step and tolerances must be positive");
}

ReferenceMax inner_max_reference(const LiftedChannels& lifted, double total_power, const OracleConfig& cfg,
                                 const std::optional<MacCovariances>& warm_start) {
  if (!(total_power > 0.0)) throw Error(ErrorCode::kConfigInvalid, "reference inner max needs a positive power");
  return solve_inner(lifted.g, lifted.k, total_power, cfg, warm_start);
}

OracleResult grid_minmax(const ChannelSet& input, double p_primary, double p_cognitive, const OracleConfig& cfg) {
  cfg.validate();
  const ChannelSet channels = validate(input);
  if (!(p_primary > 0.0) || p_cognitive < 0.0) {
    throw Error(ErrorCode::kConfigInvalid, "grid_minmax needs P_p > 0 and P_c >= 0");
  }

  OracleResult out;
  if (all_zero(channels)) {
    out.alpha_star = 1.0;
    out.sum_rate = 0.0;
    return out;
  }

  auto solve_at = [&](double alpha, const std::optional<MacCovariances>& warm) {
    const auto [g, k] = lift_for_oracle(channels, alpha);
    ReferenceMax r = solve_inner(g, k, p_primary + alpha * p_cognitive, cfg, warm);
    out.iterations += r.iterations;
    return r;
  };

  double log_lo = std::log(cfg.grid_min);
  double log_hi = std::log(cfg.grid_max);
  std::vector<GridPoint> grid;
  std::vector<MacCovariances> grid_covs;
  std::size_t best = 0;
  for (int widen = 0;; ++widen) {
    grid.clear();
    grid_covs.clear();
    std::optional<MacCovariances> warm;
    for (int i = 0; i < cfg.grid_count; ++i) {
      const double alpha = std::exp(log_lo + (log_hi - log_lo) * i / (cfg.grid_count - 1));
      ReferenceMax r = solve_at(alpha, warm);
      grid.push_back({alpha, r.objective});
      grid_covs.push_back(r.covariances);
      warm = r.covariances;
    }
    const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end(),
                                              [](const GridPoint& a, const GridPoint& b) { return a.value < b.value; });
    best = static_cast<std::size_t>(lo - grid.begin());
    const bool flat = hi->value - lo->value <= 1e-9;
    const bool at_edge = best == 0 || best + 1 == grid.size();
    if (flat || !at_edge || widen >= 3) break;
    if (best == 0) log_lo -= 3.0 * std::log(10.0);
    else log_hi += 3.0 * std::log(10.0);
    ++out.widenings;
  }

  bool rising = false;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].value > grid[i - 1].value + 1e-7) rising = true;
    else if (rising && grid[i].value < grid[i - 1].value - 1e-7) ++out.unimodality_violations;
  }

  double best_alpha = grid[best].alpha;
  double best_value = grid[best].value;
  MacCovariances best_covs = grid_covs[best];
  double half_width = (log_hi - log_lo) / (cfg.grid_count - 1);
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    const double center = std::log(best_alpha);
    constexpr int kPoints = 21;
    for (int i = 0; i < kPoints; ++i) {
      const double alpha = std::exp(center - half_width + 2.0 * half_width * i / (kPoints - 1));
      ReferenceMax r = solve_at(alpha, best_covs);
      if (r.objective < best_value) {
        best_value = r.objective;
        best_alpha = alpha;
        best_covs = r.covariances;
      }
    }
    half_width /= cfg.zoom;
  }

  out.alpha_star = best_alpha;
  out.sum_rate = best_value;
  if (cfg.keep_grid) out.grid = std::move(grid);
  return out;
}

}  // namespace mcc
