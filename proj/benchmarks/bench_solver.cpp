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

#include <benchmark/benchmark.h>

#include "mcc/oracle.hpp"
#include "mcc/random.hpp"
#include "mcc/saddle.hpp"
#include "mcc/waterfill.hpp"

namespace {

mcc::ChannelSet reference() {
  mcc::ChannelSet ch;
  ch.dims = {1, 1, 2, 2};
  ch.h_pp = mcc::Matrix(2, 1);
  ch.h_pp << -0.4326, 0.1253;
  ch.h_pc = mcc::Matrix::Zero(2, 1);
  ch.h_cp = mcc::Matrix(2, 1);
  ch.h_cp << -1.6656, 0.2877;
  ch.h_cc = mcc::Matrix(2, 1);
  ch.h_cc << -1.1465, 1.1909;
  return ch;
}

mcc::ChannelSet random_square(int n) {
  mcc::NormalSource rng(42);
  return mcc::random_channels(rng, {n, n, n, n}, true);
}

void BM_RunAlgorithm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mcc::ChannelSet ch = n == 0 ? reference() : random_square(n);
  mcc::SolverConfig cfg;
  cfg.p_primary = 5.0;
  cfg.p_cognitive = 5.0;
  cfg.algorithm = state.range(1) == 1 ? mcc::Algorithm::kExact : mcc::Algorithm::kNewton;
  for (auto _ : state) benchmark::DoNotOptimize(mcc::run_algorithm(ch, cfg).sum_rate);
}
// n = 0 is the two-antenna reference instance.
BENCHMARK(BM_RunAlgorithm)->ArgsProduct({{0, 2, 4, 8}, {1, 2}})->Unit(benchmark::kMicrosecond);

void BM_JointWaterfill(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mcc::LiftedChannels l = mcc::lift(random_square(n), 1.0);
  const mcc::EffectiveChannels eff = mcc::effective_channels(l, mcc::MacCovariances::zeros(l.dims));
  for (auto _ : state) benchmark::DoNotOptimize(mcc::joint_waterfill(eff, 10.0).level);
}
BENCHMARK(BM_JointWaterfill)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_InnerMaxToConvergence(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const mcc::LiftedChannels l = mcc::lift(random_square(n), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mcc::inner_max(l, 10.0, mcc::MacCovariances::zeros(l.dims)).objective);
  }
}
BENCHMARK(BM_InnerMaxToConvergence)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_GridMinmax(benchmark::State& state) {
  const mcc::ChannelSet ch = reference();
  mcc::OracleConfig cfg;
  cfg.grid_count = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mcc::grid_minmax(ch, 5.0, 5.0, cfg).sum_rate);
}
BENCHMARK(BM_GridMinmax)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
