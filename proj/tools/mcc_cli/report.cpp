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

#include "mcc_cli/report.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "mcc_cli/channel_file.hpp"

namespace mcc::cli {

using nlohmann::json;

double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<TraceRow> trace_rows(const IterationTrace& trace) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.size());
  for (const IterationRecord& r : trace.records()) {
    rows.push_back({r.iteration, r.alpha, r.sum_rate, nats_to_bits(r.sum_rate), r.trace_s1, r.trace_s2,
                    r.delta_alpha, r.delta_rate});
  }
  return rows;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows) {
    out << r.iter << ',' << format_double(r.alpha) << ',' << format_double(r.sum_rate_nats) << ','
        << format_double(r.sum_rate_bits) << ',' << format_double(r.tr_s1) << ',' << format_double(r.tr_s2) << ','
        << format_double(r.delta_alpha) << ',' << format_double(r.delta_rate) << '\n';
  }
}

json trace_json(const std::vector<TraceRow>& rows) {
  json arr = json::array();
  for (const TraceRow& r : rows) {
    arr.push_back({{"iter", r.iter},
                   {"alpha", r.alpha},
                   {"sum_rate_nats", r.sum_rate_nats},
                   {"sum_rate_bits", r.sum_rate_bits},
                   {"tr_S1", r.tr_s1},
                   {"tr_S2", r.tr_s2},
                   {"delta_alpha", r.delta_alpha},
                   {"delta_rate", r.delta_rate}});
  }
  return arr;
}

json result_document(const ChannelSet& channels, const SolverConfig& config, const SolveResult& result) {
  const BcCovariances bc = mac_to_bc(lift(channels, result.alpha_star), result.covariances);
  const RatePair rates = bc_rates(channels, result.alpha_star, bc);
  const TransmitPolicy policy = extract_policy(bc, result.alpha_star);
  const double slack = 1e-6;

  json doc;
  doc["status"] = std::string(to_string(result.status));
  doc["algorithm"] = static_cast<int>(config.algorithm);
  doc["inner"] = config.inner_mode == InnerMode::kOnce ? "once" : "full";
  doc["iterations"] = result.iterations;
  doc["P_p"] = config.p_primary;
  doc["P_c"] = config.p_cognitive;
  doc["alpha_star"] = result.alpha_star;
  doc["sum_rate_nats"] = result.sum_rate;
  doc["sum_rate_bits"] = nats_to_bits(result.sum_rate);
  doc["saddle_residuals"] = {{"max_ascent_gain", result.residuals.max_ascent_gain},
                             {"max_descent_gain", result.residuals.max_descent_gain}};
  doc["mac"] = {{"S1", matrix_to_json(result.covariances.s1)}, {"S2", matrix_to_json(result.covariances.s2)}};
  doc["bc"] = {{"Q_p", matrix_to_json(bc.q_p)},
               {"Q_c", matrix_to_json(bc.q_c)},
               {"Sigma_cc", matrix_to_json(bc.sigma_cc)},
               {"cognitive_leakage", bc.leakage()},
               {"R_p_nats", rates.primary},
               {"R_c_nats", rates.cognitive}};
  doc["policy"] = {{"Sigma_p", matrix_to_json(policy.sigma_p)},
                   {"Sigma_cp", matrix_to_json(policy.sigma_cp)},
                   {"Q", matrix_to_json(policy.cross)},
                   {"Sigma_cc", matrix_to_json(policy.sigma_cc)},
                   {"cognitive_net", matrix_to_json(policy.cognitive_net)},
                   {"primary_power", policy.primary_power},
                   {"cognitive_power", policy.cognitive_power},
                   {"primary_antenna_power", policy.primary_antenna_power},
                   {"cognitive_antenna_power", policy.cognitive_antenna_power},
                   {"primary_within_budget", policy.primary_antenna_power <= config.p_primary + slack},
                   {"cognitive_within_budget", policy.cognitive_antenna_power <= config.p_cognitive + slack}};
  return doc;
}

bool check_certificate(const CurvatureCertificate& cert, ConvexityTally& tally) {
  ++tally.checked;
  bool ok = true;
  const double min_eig = cert.eigenvalues.size() ? cert.eigenvalues.minCoeff() : 0.0;
  tally.worst_min_eigenvalue = std::min(tally.worst_min_eigenvalue, min_eig);
  if (min_eig < -1e-9) ok = false;

  // Summing log1p over the spectrum keeps the rounding relative to the tail itself,
  // which matters once A/alpha is small.
  auto tail = [&](double alpha) {
    double sum = 0.0;
    for (double lambda : cert.eigenvalues) sum += std::log1p(lambda / alpha);
    return sum;
  };
  constexpr int kGrid = 50;
  for (int i = 0; i < kGrid; ++i) {
    const double alpha = std::pow(10.0, -3.0 + 6.0 * i / (kGrid - 1));
    const double d2 = second_derivative_alpha(cert, alpha);
    tally.worst_second_derivative = std::min(tally.worst_second_derivative, d2);
    if (d2 < -1e-10) ok = false;

    const double h = 1e-4 * alpha;
    const double fd = (tail(alpha + h) - 2.0 * tail(alpha) + tail(alpha - h)) / (h * h);
    // The absolute floor covers A = 0 and rounding noise of the second difference.
    const double noise = 1e-12 / (alpha * alpha);
    const double err = std::abs(fd - d2);
    if (std::abs(d2) > 0.0) tally.worst_relative_fd_error = std::max(tally.worst_relative_fd_error, err / std::abs(d2));
    if (err > 1e-4 * std::abs(d2) + noise) ok = false;
  }
  if (ok) ++tally.passed;
  return ok;
}

}  // namespace mcc::cli
