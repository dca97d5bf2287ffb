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

#include "mcc_cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "mcc/error.hpp"
#include "mcc/oracle.hpp"
#include "mcc/random.hpp"
#include "mcc/waterfill.hpp"
#include "mcc_cli/channel_file.hpp"
#include "mcc_cli/report.hpp"

namespace mcc::cli {
namespace {

constexpr double kDisagreement = 1e-4;

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path);
  f << contents;
  if (!f) throw Error(ErrorCode::kIo, "failed writing " + path);
}

int exit_for(SolveStatus status) {
  return status == SolveStatus::kConverged || status == SolveStatus::kBoundaryAlpha ? kExitOk : kExitNotConverged;
}

std::string rate_text(double nats) {
  std::ostringstream s;
  s << std::setprecision(12) << nats << " nats (" << nats_to_bits(nats) << " bits)";
  return s.str();
}

}  // namespace

SolverConfig make_config(const SolveOptions& opts, int algorithm) {
  SolverConfig cfg;
  cfg.p_primary = opts.pp;
  cfg.p_cognitive = opts.pc;
  if (algorithm != 1 && algorithm != 2) throw Error(ErrorCode::kConfigInvalid, "--algorithm must be 1 or 2");
  cfg.algorithm = static_cast<Algorithm>(algorithm);
  if (opts.inner == "once") cfg.inner_mode = InnerMode::kOnce;
  else if (opts.inner == "full") cfg.inner_mode = InnerMode::kToConvergence;
  else throw Error(ErrorCode::kConfigInvalid, "--inner must be once or full");
  if (opts.tol_alpha) cfg.tol_alpha = *opts.tol_alpha;
  if (opts.tol_rate) cfg.tol_rate = *opts.tol_rate;
  if (opts.max_iter) cfg.max_outer = *opts.max_iter;
  if (opts.alpha_init) cfg.alpha_init = *opts.alpha_init;
  cfg.validate();
  return cfg;
}

Dimensions parse_dims(const std::string& text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "--dims: '" + item + "' is not an integer");
    }
  }
  if (values.size() != 4) throw Error(ErrorCode::kParse, "--dims: expected n_pt,n_ct,n_pr,n_cr");
  for (int v : values) {
    if (v < 1) throw Error(ErrorCode::kDimensionMismatch, "--dims: antenna counts must be at least 1");
  }
  return {values[0], values[1], values[2], values[3]};
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.format != "csv" && opts.format != "json") {
      throw Error(ErrorCode::kConfigInvalid, "--format must be csv or json");
    }
    const ChannelSet channels = read_channel_file(opts.channels);
    const SolverConfig cfg = make_config(opts, opts.algorithm);
    const SolveResult result = run_algorithm(channels, cfg);

    const std::vector<TraceRow> rows = trace_rows(result.trace);
    if (!opts.out.empty()) {
      std::ostringstream trace;
      if (opts.format == "csv") write_trace_csv(trace, rows);
      else trace << trace_json(rows).dump(2) << '\n';
      write_file(opts.out, trace.str());
    }
    if (!opts.policy_out.empty()) {
      write_file(opts.policy_out, result_document(channels, cfg, result).dump(2) + "\n");
    }

    out << "status: " << to_string(result.status) << '\n'
        << "iterations: " << result.iterations << '\n'
        << "alpha*: " << std::setprecision(12) << result.alpha_star << '\n'
        << "sum rate: " << rate_text(result.sum_rate) << '\n';
    return exit_for(result.status);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ChannelSet channels = read_channel_file(opts.solve.channels);
    const SolverConfig exact = make_config(opts.solve, 1);
    const SolverConfig newton = make_config(opts.solve, 2);
    OracleConfig oracle_cfg;
    oracle_cfg.grid_count = opts.grid_count;
    oracle_cfg.validate();

    auto first = std::async(std::launch::async, [&] { return run_algorithm(channels, exact); });
    auto second = std::async(std::launch::async, [&] { return run_algorithm(channels, newton); });
    auto grid = std::async(std::launch::async,
                           [&] { return grid_minmax(channels, exact.p_primary, exact.p_cognitive, oracle_cfg); });
    const SolveResult r1 = first.get();
    const SolveResult r2 = second.get();
    const OracleResult ro = grid.get();

    out << std::left << std::setw(14) << "method" << std::setw(16) << "status" << std::setw(12) << "iterations"
        << std::setw(20) << "alpha*" << std::setw(20) << "sum_rate_nats" << "sum_rate_bits\n";
    auto line = [&](const char* name, std::string_view status, int iterations, double alpha, double rate) {
      out << std::left << std::setw(14) << name << std::setw(16) << status << std::setw(12) << iterations
          << std::setw(20) << std::setprecision(12) << alpha << std::setw(20) << std::setprecision(14) << rate
          << std::setprecision(14) << nats_to_bits(rate) << '\n';
    };
    line("algorithm-1", to_string(r1.status), r1.iterations, r1.alpha_star, r1.sum_rate);
    line("algorithm-2", to_string(r2.status), r2.iterations, r2.alpha_star, r2.sum_rate);
    line("grid-oracle", "reference", ro.iterations, ro.alpha_star, ro.sum_rate);

    const double d12 = std::abs(r1.sum_rate - r2.sum_rate);
    const double d1o = std::abs(r1.sum_rate - ro.sum_rate);
    const double d2o = std::abs(r2.sum_rate - ro.sum_rate);
    out << std::setprecision(3) << "|alg1 - alg2| = " << d12 << " nats\n"
        << "|alg1 - grid| = " << d1o << " nats\n"
        << "|alg2 - grid| = " << d2o << " nats\n";

    const bool disagree = d12 > kDisagreement || d1o > kDisagreement || d2o > kDisagreement;
    const bool converged = exit_for(r1.status) == kExitOk && exit_for(r2.status) == kExitOk;
    out << "agreement: " << (disagree ? "DISAGREEMENT beyond 1e-4 nats" : "ok") << '\n';
    if (!converged) out << "note: at least one algorithm did not converge\n";
    return disagree || !converged ? kExitNotConverged : kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Dimensions dims = parse_dims(opts.dims);
    NormalSource rng(opts.seed);
    const std::string doc = write_channel_document(random_channels(rng, dims, opts.complex_entries),
                                                   opts.complex_entries);
    if (opts.out.empty()) out << doc;
    else write_file(opts.out, doc);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_check_convexity(const ConvexityOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    if (opts.samples < 0) throw Error(ErrorCode::kConfigInvalid, "--samples must be nonnegative");
    std::optional<ChannelSet> fixed;
    if (!opts.channels.empty()) fixed = read_channel_file(opts.channels);
    const Dimensions dims = fixed ? fixed->dims : parse_dims(opts.dims);

    NormalSource rng(opts.seed);
    ConvexityTally tally;
    if (fixed) {
      check_certificate(curvature_certificate(*fixed, MacCovariances::zeros(dims)), tally);
      const LiftedChannels lifted = lift(*fixed, 1.0);
      const double budget = opts.pp + opts.pc;
      if (budget > 0.0 && (lifted.g.cwiseAbs().maxCoeff() > 0.0 || lifted.k.cwiseAbs().maxCoeff() > 0.0)) {
        const WaterfillResult wf = joint_waterfill(effective_channels(lifted, MacCovariances::zeros(dims)), budget);
        check_certificate(curvature_certificate(*fixed, wf.covariances), tally);
      }
    }
    for (int i = 0; i < opts.samples; ++i) {
      const ChannelSet ch = fixed ? *fixed : random_channels(rng, dims, true);
      const double total = 10.0 * rng.uniform();
      const double split = rng.uniform();
      const MacCovariances covs{random_psd(rng, dims.n_pr, split * total),
                                random_psd(rng, dims.n_cr, (1.0 - split) * total)};
      check_certificate(curvature_certificate(ch, covs), tally);
    }

    out << "pass " << tally.passed << "/" << tally.checked << '\n'
        << std::setprecision(3) << "worst min eigenvalue of A: " << tally.worst_min_eigenvalue << '\n'
        << "worst second derivative: " << tally.worst_second_derivative << '\n'
        << "worst relative finite-difference error: " << tally.worst_relative_fd_error << '\n';
    return tally.passed == tally.checked ? kExitOk : kExitNotConverged;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sum capacity of the Gaussian MIMO cognitive radio channel"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto add_solver_flags = [](CLI::App* cmd, SolveOptions& o) {
    cmd->add_option("--channels", o.channels, "Channel file (JSON)")->required();
    cmd->add_option("--pp", o.pp, "Primary power budget P_p")->required();
    cmd->add_option("--pc", o.pc, "Cognitive power budget P_c")->required();
    cmd->add_option("--inner", o.inner, "Inner maximization: once | full");
    cmd->add_option("--tol-alpha", o.tol_alpha, "Relative alpha convergence tolerance");
    cmd->add_option("--tol-rate", o.tol_rate, "Sum-rate convergence tolerance (nats)");
    cmd->add_option("--max-iter", o.max_iter, "Outer iteration cap");
    cmd->add_option("--alpha-init", o.alpha_init, "Initial alpha");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Run algorithm 1 or 2 and write the iteration trace");
  add_solver_flags(solve_cmd, solve);
  solve_cmd->add_option("--algorithm", solve.algorithm, "1 = exact alpha minimization, 2 = Newton descent");
  solve_cmd->add_option("--out", solve.out, "Trace output path");
  solve_cmd->add_option("--format", solve.format, "Trace format: csv | json");
  solve_cmd->add_option("--policy-out", solve.policy_out, "Result document path (JSON)");

  CompareOptions compare;
  CLI::App* compare_cmd = app.add_subcommand("compare", "Run both algorithms and the grid oracle side by side");
  add_solver_flags(compare_cmd, compare.solve);
  compare_cmd->add_option("--grid-count", compare.grid_count, "Oracle grid points");

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a seeded random channel file");
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->required();
  gen_cmd->add_option("--dims", gen.dims, "n_pt,n_ct,n_pr,n_cr")->required();
  gen_cmd->add_flag("--complex", gen.complex_entries, "Circularly-symmetric complex entries");
  gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");

  ConvexityOptions convexity;
  CLI::App* convex_cmd = app.add_subcommand("check-convexity", "Check the curvature certificate on random draws");
  convex_cmd->add_option("--channels", convexity.channels, "Fix the channels instead of drawing them");
  convex_cmd->add_option("--dims", convexity.dims, "n_pt,n_ct,n_pr,n_cr for random channels");
  convex_cmd->add_option("--samples", convexity.samples, "Number of random covariance draws");
  convex_cmd->add_option("--seed", convexity.seed, "Generator seed");
  convex_cmd->add_option("--pp", convexity.pp, "P_p for the waterfilled check with --channels");
  convex_cmd->add_option("--pc", convexity.pc, "P_c for the waterfilled check with --channels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  if (*solve_cmd) return cmd_solve(solve, out, err);
  if (*compare_cmd) return cmd_compare(compare, out, err);
  if (*gen_cmd) return cmd_gen(gen, out, err);
  return cmd_check_convexity(convexity, out, err);
}

}  // namespace mcc::cli
