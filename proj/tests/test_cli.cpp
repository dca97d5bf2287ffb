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

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcc/error.hpp"
#include "mcc_cli/channel_file.hpp"
#include "mcc_cli/commands.hpp"
#include "mcc_cli/report.hpp"
#include "support/fixtures.hpp"

using namespace mcc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"mcc"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "mcc_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string reference_file() {
  return write("reference.json", cli::write_channel_document(test::reference_instance(), false));
}

}  // namespace

TEST_CASE("channel file round trip") {
  NormalSource rng(2);
  for (bool complex_entries : {false, true}) {
    const ChannelSet ch = random_channels(rng, {2, 1, 3, 2}, complex_entries);
    const ChannelSet back = cli::parse_channel_document(cli::write_channel_document(ch, complex_entries));
    CHECK(back.dims == ch.dims);
    CHECK((back.h_pp - ch.h_pp).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.h_cc - ch.h_cc).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("channel file errors name the offending field") {
  const std::string bad = R"({"n_pt":1,"n_ct":1,"n_pr":2,"n_cr":2,
    "H_pp":[[1],[2]], "H_pc":[[0],[0]], "H_cp":[[1,2,3],[0]], "H_cc":[[1],[1]]})";
  try {
    cli::parse_channel_document(bad);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).find("H_cp") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::parse_channel_document("{"), Error);
  CHECK_THROWS_AS(cli::read_channel_file((scratch_dir() / "missing.json").string()), Error);
}

TEST_CASE("channel file accepts complex pairs") {
  const std::string doc = R"({"n_pt":1,"n_ct":1,"n_pr":1,"n_cr":1,
    "H_pp":[[[1,2]]], "H_pc":[[0]], "H_cp":[[[0,-1]]], "H_cc":[[3]]})";
  const ChannelSet ch = cli::parse_channel_document(doc);
  CHECK(ch.h_pp(0, 0) == Complex(1, 2));
  CHECK(ch.h_cp(0, 0) == Complex(0, -1));
  CHECK(ch.h_cc(0, 0) == Complex(3, 0));
}

TEST_CASE("solve: reference instance") {
  const std::string trace = (scratch_dir() / "trace.csv").string();
  const std::string result = (scratch_dir() / "result.json").string();
  const Run r = invoke({"solve", "--channels", reference_file(), "--pp", "5", "--pc", "5", "--algorithm", "1",
                     "--out", trace, "--policy-out", result});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("converged") != std::string::npos);

  std::istringstream csv(slurp(trace));
  std::string line;
  std::getline(csv, line);
  CHECK(line == cli::kTraceHeader);
  std::vector<double> rates;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    for (int i = 0; i < 3; ++i) std::getline(row, cell, ',');
    rates.push_back(std::stod(cell));
  }
  REQUIRE(rates.size() >= 2);
  CHECK(std::abs(rates.back() - rates[rates.size() - 2]) < 1e-9);

  const auto doc = nlohmann::json::parse(slurp(result));
  CHECK(doc["status"] == "converged");
  CHECK(doc["sum_rate_nats"].get<double>() == doctest::Approx(rates.back()).epsilon(1e-15));
}

TEST_CASE("solve: json trace format") {
  const std::string trace = (scratch_dir() / "trace.json").string();
  const Run r = invoke({"solve", "--channels", reference_file(), "--pp", "5", "--pc", "5", "--algorithm", "2",
                     "--inner", "full", "--format", "json", "--out", trace});
  CHECK(r.code == cli::kExitOk);
  const auto doc = nlohmann::json::parse(slurp(trace));
  REQUIRE(doc.is_array());
  CHECK(doc.back().contains("sum_rate_bits"));
}

TEST_CASE("solve: zero channels give a single-row trace") {
  const std::string zero = write("zero.json", cli::write_channel_document(ChannelSet::zeros({1, 2, 2, 1}), false));
  const std::string trace = (scratch_dir() / "zero.csv").string();
  const Run r = invoke({"solve", "--channels", zero, "--pp", "1", "--pc", "1", "--out", trace});
  CHECK(r.code == cli::kExitOk);
  std::istringstream csv(slurp(trace));
  std::string header, row, extra;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(row.rfind("1,", 0) == 0);
  CHECK_FALSE(static_cast<bool>(std::getline(csv, extra)));
}

TEST_CASE("solve: input errors exit 1 with a one-line diagnostic") {
  const std::string bad = write("bad.json", R"({"n_pt":1,"n_ct":1,"n_pr":2,"n_cr":2,
    "H_pp":[[1],[2]], "H_pc":[[0],[0]], "H_cp":[[1,2,3],[0]], "H_cc":[[1],[1]]})");
  Run r = invoke({"solve", "--channels", bad, "--pp", "5", "--pc", "5"});
  CHECK(r.code == cli::kExitInputError);
  CHECK(r.err.find("H_cp") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  r = invoke({"solve", "--channels", reference_file(), "--pp", "-1", "--pc", "5"});
  CHECK(r.code == cli::kExitInputError);
  r = invoke({"solve", "--channels", reference_file(), "--pp", "5", "--pc", "5", "--algorithm", "3"});
  CHECK(r.code == cli::kExitInputError);
  r = invoke({"solve", "--pp", "5", "--pc", "5"});
  CHECK(r.code == cli::kExitInputError);
  r = invoke({"bogus"});
  CHECK(r.code == cli::kExitInputError);
}

TEST_CASE("solve: iteration cap exits 2") {
  const Run r = invoke({"solve", "--channels", reference_file(), "--pp", "5", "--pc", "5", "--max-iter", "1"});
  CHECK(r.code == cli::kExitNotConverged);
  CHECK(r.out.find("max-iterations") != std::string::npos);
}

TEST_CASE("compare: reference instance agrees") {
  const Run r = invoke({"compare", "--channels", reference_file(), "--pp", "5", "--pc", "5", "--grid-count", "300"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("agreement: ok") != std::string::npos);
}

TEST_CASE("compare: zero channels") {
  const std::string zero = write("zero2.json", cli::write_channel_document(ChannelSet::zeros({1, 1, 1, 1}), false));
  const Run r = invoke({"compare", "--channels", zero, "--pp", "2", "--pc", "2", "--grid-count", "20"});
  CHECK(r.code == cli::kExitOk);
}

TEST_CASE("gen: deterministic, seed-sensitive, validated") {
  const Run a = invoke({"gen", "--seed", "7", "--dims", "1,1,2,2"});
  const Run b = invoke({"gen", "--seed", "7", "--dims", "1,1,2,2"});
  const Run c = invoke({"gen", "--seed", "8", "--dims", "1,1,2,2"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  const ChannelSet ch = cli::parse_channel_document(a.out);
  CHECK(ch.dims == Dimensions{1, 1, 2, 2});

  const std::string path = (scratch_dir() / "gen.json").string();
  CHECK(invoke({"gen", "--seed", "7", "--dims", "1,1,2,2", "--out", path}).code == 0);
  CHECK(slurp(path) == a.out);

  CHECK(invoke({"gen", "--seed", "7", "--dims", "0,1,1,1"}).code == cli::kExitInputError);
  CHECK(invoke({"gen", "--seed", "7", "--dims", "1,1,1"}).code == cli::kExitInputError);
  CHECK(invoke({"gen", "--seed", "7", "--dims", "1,x,1,1"}).code == cli::kExitInputError);
}

TEST_CASE("check-convexity") {
  Run r = invoke({"check-convexity", "--samples", "100", "--seed", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pass 100/100") != std::string::npos);
  r = invoke({"check-convexity", "--channels", reference_file(), "--samples", "10", "--pp", "5", "--pc", "5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pass 12/12") != std::string::npos);
}

TEST_CASE("certificate check passes for zero covariances") {
  const ChannelSet ch = test::reference_instance();
  cli::ConvexityTally tally;
  CHECK(cli::check_certificate(curvature_certificate(ch, MacCovariances::zeros(ch.dims)), tally));
}
