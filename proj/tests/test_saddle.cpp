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

#include <doctest.h>

#include <stdexcept>

#include "mcc/error.hpp"
#include "mcc/oracle.hpp"
#include "mcc/saddle.hpp"
#include "support/fixtures.hpp"

using namespace mcc;

namespace {

SolverConfig config(double pp, double pc, Algorithm algorithm = Algorithm::kExact) {
  SolverConfig cfg;
  cfg.p_primary = pp;
  cfg.p_cognitive = pc;
  cfg.algorithm = algorithm;
  return cfg;
}

MacCovariances first_waterfill(const ChannelSet& ch, const SolverConfig& cfg) {
  const LiftedChannels l = lift(ch, 1.0);
  return joint_waterfill(effective_channels(l, MacCovariances::zeros(ch.dims)), cfg.budget(1.0)).covariances;
}

}  // namespace

TEST_CASE("solver config validation") {
  SolverConfig cfg = config(5, 5);
  CHECK_NOTHROW(cfg.validate());
  cfg.p_primary = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = config(5, -1);
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = config(5, 5);
  cfg.alpha_init = 1e7;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = config(5, 5);
  cfg.max_outer = 0;
  try {
    cfg.validate();
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigInvalid);
  }
}

TEST_CASE("alpha objective identities") {
  const ChannelSet ch = test::reference_instance();
  const SolverConfig cfg = config(5, 5);
  const MacCovariances covs = first_waterfill(ch, cfg);
  CHECK(alpha_objective(ch, covs, 1.0, 1.0, cfg) == doctest::Approx(objective(lift(ch, 1.0), covs)).epsilon(1e-15));
  for (double beta : {1e-3, 0.5, 7.0}) CHECK(alpha_objective(ch, MacCovariances::zeros(ch.dims), 1.0, beta, cfg) == 0.0);

  for (double beta : {0.5, 1.0, 2.0}) {
    const double gamma = (5.0 + 5.0 * beta) / 10.0;
    const double expected = test::brute_objective(ch, beta, gamma * covs.s1, gamma * covs.s2);
    CHECK(alpha_objective(ch, covs, 1.0, beta, cfg) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("alpha objective derivatives match finite differences") {
  NormalSource rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Dimensions d = test::random_dims(rng, 3);
    const ChannelSet ch = random_channels(rng, d, true);
    const SolverConfig cfg = config(0.5 + 5 * rng.uniform(), 5 * rng.uniform());
    const MacCovariances covs{random_psd(rng, d.n_pr, 3.0), random_psd(rng, d.n_cr, 2.0)};
    const double prev = std::exp(rng.next());
    const double beta = std::exp(rng.next());
    const AlphaDerivatives der = alpha_objective_derivatives(ch, covs, prev, beta, cfg);
    const double h = 1e-4 * beta;
    const double fp = alpha_objective(ch, covs, prev, beta + h, cfg);
    const double f0 = alpha_objective(ch, covs, prev, beta, cfg);
    const double fm = alpha_objective(ch, covs, prev, beta - h, cfg);
    CHECK(der.value == doctest::Approx(f0).epsilon(1e-13));
    CHECK(der.first == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6).scale(1.0 / beta));
    CHECK(der.second == doctest::Approx((fp - 2 * f0 + fm) / (h * h)).epsilon(1e-4).scale(1.0 / (beta * beta)));
  }
}

TEST_CASE("exact alpha step: zero covariances keep alpha") {
  const ChannelSet ch = test::reference_instance();
  const AlphaUpdate u = minimize_alpha_exact(ch, MacCovariances::zeros(ch.dims), 1.7, config(5, 5));
  CHECK(u.flat);
  CHECK(u.alpha == 1.7);
}

TEST_CASE("exact alpha step: no cognitive channel pins alpha at the lower bound") {
  ChannelSet ch = test::reference_instance();
  ch.h_cp.setZero();
  ch.h_cc.setZero();
  const SolverConfig cfg = config(5, 5);
  const AlphaUpdate u = minimize_alpha_exact(ch, first_waterfill(ch, cfg), 1.0, cfg);
  CHECK(u.at_boundary);
  CHECK(u.alpha == doctest::Approx(cfg.alpha_min));
  // g really is increasing in beta here.
  double last = -1.0;
  for (double beta : {1e-6, 1e-3, 1.0, 1e3}) {
    const double v = alpha_objective(ch, first_waterfill(ch, cfg), 1.0, beta, cfg);
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("exact alpha step matches a fine grid scan") {
  const ChannelSet ch = test::reference_instance();
  const SolverConfig cfg = config(5, 5);
  const MacCovariances covs = first_waterfill(ch, cfg);
  const AlphaUpdate u = minimize_alpha_exact(ch, covs, 1.0, cfg);

  auto g = [&](double beta) {
    const double gamma = cfg.budget(beta) / cfg.budget(1.0);
    return test::brute_objective(ch, beta, gamma * covs.s1, gamma * covs.s2);
  };
  // Coarse log scan over the whole range, then 10^6 points across the best cell.
  double best = cfg.alpha_min;
  for (int i = 0; i <= 2000; ++i) {
    const double beta = cfg.alpha_min * std::pow(cfg.alpha_max / cfg.alpha_min, i / 2000.0);
    if (g(beta) < g(best)) best = beta;
  }
  const double lo = best / 1.02;
  const double hi = best * 1.02;
  double fine = lo;
  double fine_value = g(lo);
  constexpr int kFine = 1'000'000;
  for (int i = 1; i <= kFine; ++i) {
    const double beta = lo + (hi - lo) * i / kFine;
    const double v = g(beta);
    if (v < fine_value) {
      fine_value = v;
      fine = beta;
    }
  }
  CHECK(std::abs(u.alpha - fine) <= 1e-6 * fine);
  CHECK_FALSE(u.at_boundary);
}

TEST_CASE("Newton step: scalar closed form") {
  // g(beta) = log(1 + a / beta) when only H_cp is active and P_c = 0.
  ChannelSet ch = ChannelSet::zeros({1, 1, 1, 1});
  ch.h_cp(0, 0) = 1.0;
  SolverConfig cfg = config(1, 0);
  for (double a : {0.5, 2.0}) {
    for (double b0 : {0.3, 1.0, 4.0}) {
      MacCovariances covs = MacCovariances::zeros(ch.dims);
      covs.s1(0, 0) = a;
      const AlphaUpdate u = newton_alpha_step(ch, covs, b0, cfg);
      CHECK(u.alpha == doctest::Approx(b0 + b0 * (b0 + a) / (2 * b0 + a)).epsilon(1e-12));
      CHECK_FALSE(u.fallback);
    }
  }
}

TEST_CASE("Newton step: from the exact minimizer it barely moves") {
  const ChannelSet ch = test::reference_instance();
  const SolverConfig cfg = config(5, 5);
  const MacCovariances covs = first_waterfill(ch, cfg);
  const double a_exact = minimize_alpha_exact(ch, covs, 1.0, cfg).alpha;
  const double gamma = cfg.budget(a_exact) / cfg.budget(1.0);
  const AlphaUpdate u = newton_alpha_step(ch, covs.scaled(gamma), a_exact, cfg);
  CHECK(std::abs(u.alpha - a_exact) <= cfg.tol_alpha * a_exact);
}

TEST_CASE("Newton step never increases g") {
  NormalSource rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const Dimensions d = test::random_dims(rng, 3);
    const ChannelSet ch = random_channels(rng, d, false);
    const SolverConfig cfg = config(0.5 + 5 * rng.uniform(), 0.5 + 5 * rng.uniform());
    const MacCovariances covs{random_psd(rng, d.n_pr, 3.0), random_psd(rng, d.n_cr, 2.0)};
    const double prev = std::exp(2 * rng.next());
    const AlphaUpdate u = newton_alpha_step(ch, covs, prev, cfg);
    CHECK(alpha_objective(ch, covs, prev, u.alpha, cfg) <= alpha_objective(ch, covs, prev, prev, cfg) + 1e-12);
  }
}

TEST_CASE("iteration trace requires increasing iteration numbers") {
  IterationTrace t;
  t.append({.iteration = 1});
  t.append({.iteration = 2});
  CHECK_THROWS_AS(t.append({.iteration = 2}), std::logic_error);
  CHECK(t.size() == 2);
}

TEST_CASE("status names") {
  CHECK(to_string(SolveStatus::kConverged) == "converged");
  CHECK(to_string(SolveStatus::kMaxIterations) == "max-iterations");
  CHECK(to_string(SolveStatus::kStalled) == "stalled");
  CHECK(to_string(SolveStatus::kBoundaryAlpha) == "boundary-alpha");
}

TEST_CASE("run_algorithm: both rules agree on the reference instance") {
  const ChannelSet ch = test::reference_instance();
  for (InnerMode inner : {InnerMode::kOnce, InnerMode::kToConvergence}) {
    SolverConfig c1 = config(5, 5, Algorithm::kExact);
    SolverConfig c2 = config(5, 5, Algorithm::kNewton);
    c1.inner_mode = c2.inner_mode = inner;
    const SolveResult r1 = run_algorithm(ch, c1);
    const SolveResult r2 = run_algorithm(ch, c2);
    CHECK(r1.status == SolveStatus::kConverged);
    CHECK(r2.status == SolveStatus::kConverged);
    CHECK(r1.iterations <= 100);
    CHECK(r2.iterations <= 100);
    CHECK(std::abs(r1.sum_rate - r2.sum_rate) <= 1e-5);
    CHECK(r1.covariances.total_trace() == doctest::Approx(c1.budget(r1.alpha_star)).epsilon(1e-10));
    CHECK(r1.residuals.max_ascent_gain <= 1e-5);
    CHECK(r1.residuals.max_descent_gain <= 1e-5);
    // Final trace rows are flat.
    const auto& rows = r1.trace.records();
    CHECK(std::abs(rows.back().delta_rate) < 1e-9);
  }
}

TEST_CASE("run_algorithm: degenerate instances") {
  ChannelSet ch = test::reference_instance();
  ch.h_cp.setZero();
  ch.h_cc.setZero();
  const SolveResult single = run_algorithm(ch, config(5, 0));
  CHECK(std::abs(single.sum_rate - test::brute_single_user_capacity(ch.h_pp.adjoint(), 5.0)) <= 1e-8);

  const SolveResult zero = run_algorithm(ChannelSet::zeros({2, 1, 2, 3}), config(5, 5));
  CHECK(zero.status == SolveStatus::kConverged);
  CHECK(zero.sum_rate == 0.0);
  CHECK(zero.trace.size() == 1);
}

TEST_CASE("run_algorithm property: matches the grid oracle on random instances") {
  NormalSource rng(123);
  OracleConfig ocfg;
  ocfg.grid_count = 200;
  for (int trial = 0; trial < 6; ++trial) {
    const Dimensions d = test::random_dims(rng, 2);
    const ChannelSet ch = random_channels(rng, d, true);
    const SolverConfig cfg = config(1.0 + 4 * rng.uniform(), 1.0 + 4 * rng.uniform(),
                                    trial % 2 ? Algorithm::kNewton : Algorithm::kExact);
    const SolveResult r = run_algorithm(ch, cfg);
    const OracleResult o = grid_minmax(ch, cfg.p_primary, cfg.p_cognitive, ocfg);
    CHECK(std::abs(r.sum_rate - o.sum_rate) <= 1e-3);
  }
}

TEST_CASE("curvature certificate: small cases") {
  const ChannelSet ch = test::reference_instance();
  const CurvatureCertificate zero = curvature_certificate(ch, MacCovariances::zeros(ch.dims));
  CHECK(zero.c == 0.0);
  CHECK(zero.a.cwiseAbs().maxCoeff() == 0.0);
  CHECK(second_derivative_alpha(zero, 0.3) == 0.0);

  ChannelSet s = ChannelSet::zeros({1, 1, 1, 1});
  const double hpp = 0.8, hcp = -1.1, hcc = 0.6, s1 = 1.5, s2 = 0.7;
  s.h_pp(0, 0) = hpp;
  s.h_cp(0, 0) = hcp;
  s.h_cc(0, 0) = hcc;
  MacCovariances covs = MacCovariances::zeros(s.dims);
  covs.s1(0, 0) = s1;
  covs.s2(0, 0) = s2;
  const CurvatureCertificate cert = curvature_certificate(s, covs);
  const double expected = hcp * hcp * s1 + hcc * hcc * s2 - hcp * hcp * s1 * s1 * hpp * hpp / (1 + hpp * hpp * s1);
  CHECK(cert.a(0, 0).real() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("curvature certificate reconstructs the objective") {
  NormalSource rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Dimensions d = test::random_dims(rng, 3);
    const ChannelSet ch = random_channels(rng, d, true);
    const MacCovariances covs{random_psd(rng, d.n_pr, 4.0), random_psd(rng, d.n_cr, 4.0)};
    const CurvatureCertificate cert = curvature_certificate(ch, covs);
    for (double alpha : {0.1, 1.0, 10.0}) {
      CHECK(std::abs(cert.evaluate(alpha) - objective(lift(ch, alpha), covs)) <= 1e-9);
    }
  }
}

TEST_CASE("second derivative: scalar closed form") {
  CurvatureCertificate cert;
  cert.a = Matrix::Identity(1, 1);
  cert.eigenvalues = RealVector::Ones(1);
  CHECK(std::abs(second_derivative_alpha(cert, 1.0) - 0.75) <= 1e-12);
  for (double a : {0.2, 3.0}) {
    for (double alpha : {0.05, 1.0, 40.0}) {
      cert.a(0, 0) = a;
      cert.eigenvalues(0) = a;
      const double x = a / alpha;
      CHECK(second_derivative_alpha(cert, alpha) ==
            doctest::Approx((a / (alpha * alpha * alpha)) * (2 + x) / ((1 + x) * (1 + x))).epsilon(1e-13));
    }
  }
}

TEST_CASE("second derivative matches finite differences of F") {
  NormalSource rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const Dimensions d = test::random_dims(rng, 3);
    const ChannelSet ch = random_channels(rng, d, true);
    const MacCovariances covs{random_psd(rng, d.n_pr, 5.0), random_psd(rng, d.n_cr, 5.0)};
    const CurvatureCertificate cert = curvature_certificate(ch, covs);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cert.a, Eigen::EigenvaluesOnly);
    auto tail = [&](double alpha) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) sum += std::log1p(es.eigenvalues()(i) / alpha);
      return sum;
    };
    for (double alpha : {0.01, 0.3, 2.0, 50.0}) {
      const double h = 1e-4 * alpha;
      const double fd = (tail(alpha + h) - 2 * tail(alpha) + tail(alpha - h)) / (h * h);
      const double d2 = second_derivative_alpha(cert, alpha);
      CHECK(d2 >= 0.0);
      CHECK(std::abs(fd - d2) <= 1e-4 * d2 + 1e-12 / (alpha * alpha));
    }
  }
}
