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

#include "mcc/saddle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mcc/error.hpp"
#include "mcc/random.hpp"

namespace mcc {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfigInvalid, what);
}

// g(beta) for fixed covariances, expressed through the unlifted Gram matrix
//   N = [H_pp H_cp]^H S1 [H_pp H_cp] + [0 H_cc]^H S2 [0 H_cc]
// so that M(beta) = I + gamma(beta) D N D with D = blockdiag(I, beta^-1/2 I).
class AlphaProblem {
 public:
  AlphaProblem(const ChannelSet& channels, const MacCovariances& covs, double alpha_prev,
               const SolverConfig& config)
      : n_pt_(channels.dims.n_pt),
        m_(channels.dims.mac_dim()),
        p_primary_(config.p_primary),
        p_cognitive_(config.p_cognitive),
        reference_budget_(config.budget(alpha_prev)) {
    check_covariances(lift(channels, alpha_prev), covs);
    const LiftedChannels unlifted = lift(channels, 1.0);
    gram_ = linalg::hermitian_part(unlifted.g.adjoint() * covs.s1 * unlifted.g +
                                   unlifted.k.adjoint() * covs.s2 * unlifted.k);
  }

  double value(double beta) const {
    check_beta(beta);
    return linalg::log_det_hpd(system(beta, 0));
  }

  AlphaDerivatives derivatives(double beta) const {
    check_beta(beta);
    const double gamma = gamma_at(beta);
    const double dgamma = p_cognitive_ / reference_budget_;
    const Matrix w0 = scaled_gram(beta, 0);
    const Matrix w1 = scaled_gram(beta, 1);
    const Matrix w2 = scaled_gram(beta, 2);
    const Matrix m = Matrix::Identity(m_, m_) + gamma * w0;
    const Matrix dm = dgamma * w0 + gamma * w1;
    const Matrix d2m = 2.0 * dgamma * w1 + gamma * w2;

    Eigen::LLT<Matrix> llt(linalg::hermitian_part(m));
    const Matrix inv_dm = llt.solve(dm);
    const Matrix inv_d2m = llt.solve(d2m);
    AlphaDerivatives out;
    out.value = linalg::log_det_hpd(m);
    out.first = inv_dm.trace().real();
    out.second = inv_d2m.trace().real() - (inv_dm * inv_dm).trace().real();
    return out;
  }

 private:
  static void check_beta(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
      throw Error(ErrorCode::kNonPositiveAlpha, "beta must be positive, got " + std::to_string(beta));
    }
  }

  double gamma_at(double beta) const { return (p_primary_ + beta * p_cognitive_) / reference_budget_; }

  Matrix system(double beta, int order) const {
    return Matrix::Identity(m_, m_) + gamma_at(beta) * scaled_gram(beta, order);
  }

  // The `order`-th beta-derivative of D N D. Entry (i, j) scales as beta^-e with
  // e = (#cognitive indices among i, j) / 2.
  Matrix scaled_gram(double beta, int order) const {
    double factor[3][3];
    for (int q = 0; q < 3; ++q) {
      const double e = 0.5 * q;
      const double base = std::pow(beta, -e);
      factor[0][q] = base;
      factor[1][q] = -e * base / beta;
      factor[2][q] = e * (e + 1.0) * base / (beta * beta);
    }
    Matrix out(m_, m_);
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < m_; ++j) {
        const int q = (i >= n_pt_ ? 1 : 0) + (j >= n_pt_ ? 1 : 0);
        out(i, j) = gram_(i, j) * factor[order][q];
      }
    }
    return out;
  }

  int n_pt_;
  int m_;
  double p_primary_;
  double p_cognitive_;
  double reference_budget_;
  Matrix gram_;
};

AlphaDerivatives finite_difference(const AlphaProblem& problem, double beta, const SolverConfig& config) {
  const double h = 1e-4 * beta;
  const double lo = std::max(beta - h, 0.5 * config.alpha_min);
  const double hi = beta + h;
  const double f0 = problem.value(beta);
  const double fl = problem.value(lo);
  const double fh = problem.value(hi);
  AlphaDerivatives out;
  out.value = f0;
  out.first = (fh - fl) / (hi - lo);
  out.second = 2.0 * ((fh - f0) / (hi - beta) - (f0 - fl) / (beta - lo)) / (hi - lo);
  return out;
}

bool near_boundary(double alpha, const SolverConfig& config) {
  return alpha <= config.alpha_min * (1.0 + 1e-6) || alpha >= config.alpha_max * (1.0 - 1e-6);
}

}  // namespace

void SolverConfig::validate() const {
  require(p_primary > 0.0 && std::isfinite(p_primary), "P_p must be positive");
  require(p_cognitive >= 0.0 && std::isfinite(p_cognitive), "P_c must be nonnegative");
  require(algorithm == Algorithm::kExact || algorithm == Algorithm::kNewton, "algorithm must be 1 or 2");
  require(alpha_min > 0.0 && alpha_min < alpha_init && alpha_init < alpha_max && std::isfinite(alpha_max),
          "alpha bounds must satisfy 0 < alpha_min < alpha_init < alpha_max");
  require(tol_alpha > 0.0 && tol_rate > 0.0, "tolerances must be positive");
  require(max_outer >= 1, "max_outer must be at least 1");
  require(stall_window >= 1, "stall_window must be at least 1");
  require(damping > 0.0 && damping <= 1.0, "damping must lie in (0, 1]");
}

AlphaSearchState AlphaSearchState::make(const SolverConfig& config, double alpha_prev, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::kNonPositiveAlpha, "beta must be positive");
  if (!(alpha_prev > 0.0)) throw Error(ErrorCode::kNonPositiveAlpha, "alpha_prev must be positive");
  return {alpha_prev, beta, config.budget(beta) / config.budget(alpha_prev)};
}

double alpha_objective(const ChannelSet& channels, const MacCovariances& covs, double alpha_prev,
                       double beta, const SolverConfig& config) {
  const AlphaSearchState state = AlphaSearchState::make(config, alpha_prev, beta);
  return objective(lift(channels, state.beta), covs.scaled(state.gamma));
}

AlphaDerivatives alpha_objective_derivatives(const ChannelSet& channels, const MacCovariances& covs,
                                             double alpha_prev, double beta, const SolverConfig& config) {
  AlphaSearchState::make(config, alpha_prev, beta);
  return AlphaProblem(channels, covs, alpha_prev, config).derivatives(beta);
}

AlphaUpdate minimize_alpha_exact(const ChannelSet& channels, const MacCovariances& covs, double alpha_prev,
                                 const SolverConfig& config) {
  const AlphaProblem problem(channels, covs, alpha_prev, config);
  const double t_min = std::log(config.alpha_min);
  const double t_max = std::log(config.alpha_max);
  auto f = [&](double t) { return problem.value(std::exp(t)); };

  constexpr int kScan = 64;
  std::array<double, kScan> ts{};
  std::array<double, kScan> vs{};
  for (int i = 0; i < kScan; ++i) {
    ts[i] = t_min + (t_max - t_min) * i / (kScan - 1);
    vs[i] = f(ts[i]);
  }
  const auto [lo_it, hi_it] = std::minmax_element(vs.begin(), vs.end());
  AlphaUpdate out;
  if (*hi_it - *lo_it <= 1e-13 * (1.0 + std::abs(*lo_it))) {
    out.alpha = alpha_prev;
    out.flat = true;
    out.at_boundary = near_boundary(alpha_prev, config);
    return out;
  }
  for (int i = 0; i < kScan; ++i) {
    const bool left = i == 0 || vs[i] < vs[i - 1];
    const bool right = i == kScan - 1 || vs[i] < vs[i + 1];
    if (left && right) ++out.scan_minima;
  }

  const int best = static_cast<int>(lo_it - vs.begin());
  double a = ts[std::max(best - 1, 0)];
  double b = ts[std::min(best + 1, kScan - 1)];

  // Golden section in log(beta) down to a bracket where function values still resolve.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-4) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }

  auto slope = [&](double t) { return problem.derivatives(std::exp(t)).first; };
  double t_star;
  const double sa = slope(a);
  const double sb = slope(b);
  if (sa < 0.0 && sb > 0.0) {
    // Interior stationary point: bisect on the sign of dg/dbeta, which stays accurate
    // where g itself is too flat to compare.
    while (b - a > 1e-13) {
      const double mid = 0.5 * (a + b);
      (slope(mid) < 0.0 ? a : b) = mid;
    }
    t_star = 0.5 * (a + b);
  } else {
    while (b - a > 1e-10) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = f(d);
      }
    }
    t_star = 0.5 * (a + b);
    // Prefer an exact endpoint when the minimum sits on the search boundary.
    if (std::abs(t_star - t_min) < 1e-6 && f(t_min) <= f(t_star)) t_star = t_min;
    if (std::abs(t_star - t_max) < 1e-6 && f(t_max) <= f(t_star)) t_star = t_max;
  }

  out.alpha = std::clamp(std::exp(t_star), config.alpha_min, config.alpha_max);
  out.at_boundary = near_boundary(out.alpha, config);
  return out;
}

AlphaUpdate newton_alpha_step(const ChannelSet& channels, const MacCovariances& covs, double alpha_prev,
                              const SolverConfig& config) {
  const AlphaProblem problem(channels, covs, alpha_prev, config);
  AlphaDerivatives d = problem.derivatives(alpha_prev);
  if (!std::isfinite(d.first) || !std::isfinite(d.second)) d = finite_difference(problem, alpha_prev, config);

  AlphaUpdate out;
  out.alpha = alpha_prev;
  if (d.first == 0.0) {
    out.at_boundary = near_boundary(alpha_prev, config);
    return out;
  }

  double step;
  if (d.second > 0.0) {
    step = -d.first / d.second;
  } else {
    out.fallback = true;
    step = (d.first > 0.0 ? -0.5 : 0.5) * alpha_prev;
  }

  const double g0 = d.value;
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(g0));
  for (int halving = 0; halving < 60; ++halving) {
    const double candidate = std::clamp(alpha_prev + step, config.alpha_min, config.alpha_max);
    if (problem.value(candidate) <= g0 + slack) {
      out.alpha = candidate;
      break;
    }
    step *= 0.5;
  }
  out.at_boundary = near_boundary(out.alpha, config);
  return out;
}

void IterationTrace::append(const IterationRecord& record) {
  if (!records_.empty() && record.iteration <= records_.back().iteration) {
    throw std::logic_error("iteration trace records must be strictly increasing");
  }
  records_.push_back(record);
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max-iterations";
    case SolveStatus::kStalled: return "stalled";
    case SolveStatus::kBoundaryAlpha: return "boundary-alpha";
  }
  return "unknown";
}

SolveResult run_algorithm(const ChannelSet& input, const SolverConfig& config) {
  config.validate();
  const ChannelSet channels = validate(input);

  SolveResult result;
  double alpha = config.alpha_init;
  MacCovariances covs = MacCovariances::zeros(channels.dims);

  const LiftedChannels first = lift(channels, alpha);
  if (first.g.cwiseAbs().maxCoeff() == 0.0 && first.k.cwiseAbs().maxCoeff() == 0.0) {
    result.status = SolveStatus::kConverged;
    result.alpha_star = alpha;
    result.covariances = covs;
    result.iterations = 1;
    result.trace.append({1, alpha, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0});
    return result;
  }

  InnerOptions inner;
  inner.mode = config.inner_mode;
  inner.damping = config.damping;

  std::vector<double> rates;
  double previous_rate = 0.0;
  bool done = false;
  for (int n = 1; n <= config.max_outer && !done; ++n) {
    const LiftedChannels lifted = lift(channels, alpha);
    const InnerMaxResult step = inner_max(lifted, config.budget(alpha), covs, inner);

    const AlphaUpdate update = config.algorithm == Algorithm::kExact
                                   ? minimize_alpha_exact(channels, step.covariances, alpha, config)
                                   : newton_alpha_step(channels, step.covariances, alpha, config);
    const double gamma = config.budget(update.alpha) / config.budget(alpha);
    const MacCovariances carried = step.covariances.scaled(gamma);
    const double rate = objective(lift(channels, update.alpha), carried);

    IterationRecord rec;
    rec.iteration = n;
    rec.alpha = update.alpha;
    rec.sum_rate = rate;
    rec.trace_s1 = linalg::real_trace(carried.s1);
    rec.trace_s2 = linalg::real_trace(carried.s2);
    rec.delta_alpha = std::abs(update.alpha - alpha);
    rec.delta_rate = std::abs(rate - previous_rate);
    rec.inner_passes = step.passes;
    rec.scan_minima = update.scan_minima;
    result.trace.append(rec);

    alpha = update.alpha;
    covs = carried;
    previous_rate = rate;
    rates.push_back(rate);
    result.iterations = n;

    const bool converged = n >= 2 && rec.delta_alpha <= config.tol_alpha * std::max(1.0, alpha) &&
                           rec.delta_rate <= config.tol_rate;
    if (converged) {
      result.status = near_boundary(alpha, config) ? SolveStatus::kBoundaryAlpha : SolveStatus::kConverged;
      done = true;
    } else if (n > config.stall_window &&
               std::abs(rate - rates[static_cast<std::size_t>(n - 1 - config.stall_window)]) <= config.tol_rate) {
      result.status = SolveStatus::kStalled;
      done = true;
    }
  }
  if (!done) result.status = SolveStatus::kMaxIterations;

  result.alpha_star = alpha;
  result.covariances = covs;
  result.sum_rate = objective(lift(channels, alpha), covs);
  if (result.status == SolveStatus::kConverged || result.status == SolveStatus::kBoundaryAlpha) {
    result.residuals = saddle_probes(channels, alpha, covs, config);
  }
  return result;
}

SaddleResiduals saddle_probes(const ChannelSet& channels, double alpha, const MacCovariances& covs,
                              const SolverConfig& config, int covariance_probes) {
  const LiftedChannels lifted = lift(channels, alpha);
  const double base = objective(lifted, covs);
  const double budget = config.budget(alpha);
  NormalSource rng(config.seed);

  SaddleResiduals out;
  for (int i = 0; i < covariance_probes; ++i) {
    const double split = rng.uniform();
    const Matrix r1 = random_psd(rng, channels.dims.n_pr, split * budget);
    const Matrix r2 = random_psd(rng, channels.dims.n_cr, (1.0 - split) * budget);
    const double t = std::pow(10.0, -3.0 * rng.uniform());
    const MacCovariances probe{(1.0 - t) * covs.s1 + t * r1, (1.0 - t) * covs.s2 + t * r2};
    out.max_ascent_gain = std::max(out.max_ascent_gain, objective(lifted, probe) - base);
  }
  for (double factor : {0.99, 1.01}) {
    const double beta = std::clamp(alpha * factor, config.alpha_min, config.alpha_max);
    const double moved = alpha_objective(channels, covs, alpha, beta, config);
    out.max_descent_gain = std::max(out.max_descent_gain, base - moved);
  }
  return out;
}

double CurvatureCertificate::evaluate(double alpha) const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kNonPositiveAlpha, "alpha must be positive");
  return c + linalg::log_det_hpd(Matrix::Identity(a.rows(), a.cols()) + a / alpha);
}

CurvatureCertificate curvature_certificate(const ChannelSet& channels, const MacCovariances& covs) {
  check_covariances(lift(channels, 1.0), covs);
  const Matrix& hpp = channels.h_pp;
  const Matrix& hcp = channels.h_cp;
  const Matrix& hcc = channels.h_cc;
  const Matrix primary = Matrix::Identity(hpp.cols(), hpp.cols()) + hpp.adjoint() * covs.s1 * hpp;
  const Matrix cross = hcp.adjoint() * covs.s1 * hpp;

  CurvatureCertificate out;
  out.c = linalg::log_det_hpd(primary);
  out.a = linalg::hermitian_part(hcp.adjoint() * covs.s1 * hcp + hcc.adjoint() * covs.s2 * hcc -
                                 cross * primary.llt().solve(cross.adjoint()));
  out.eigenvalues = linalg::hermitian_eigenvalues(out.a);
  return out;
}

double second_derivative_alpha(const CurvatureCertificate& cert, double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::kNonPositiveAlpha, "alpha must be positive");
  const Eigen::Index n = cert.a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix x = cert.a / alpha;
  const Matrix resolvent = (ident + x).inverse();
  const Matrix term = (cert.a / (alpha * alpha * alpha)) * resolvent * (2.0 * ident + x) * resolvent;
  return term.trace().real();
}

}  // namespace mcc
