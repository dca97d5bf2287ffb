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

#include "mcc_cli/channel_file.hpp"

#include <fstream>
#include <sstream>

#include "mcc/error.hpp"

namespace mcc::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kParse, field + ": " + what);
}

int read_count(const json& doc, const char* field) {
  if (!doc.contains(field)) fail(field, "missing");
  const json& v = doc.at(field);
  if (!v.is_number_integer()) fail(field, "must be an integer");
  const auto n = v.get<long long>();
  if (n < 1) throw Error(ErrorCode::kDimensionMismatch, std::string(field) + ": antenna count must be at least 1");
  return static_cast<int>(n);
}

Complex read_entry(const json& e, const std::string& where) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
    return {e[0].get<double>(), e[1].get<double>()};
  }
  fail(where, "entry must be a number or an [re, im] pair");
}

Matrix read_matrix(const json& doc, const char* field, int rows, int cols) {
  if (!doc.contains(field)) fail(field, "missing");
  const json& m = doc.at(field);
  if (!m.is_array()) fail(field, "must be an array of rows");
  if (static_cast<int>(m.size()) != rows) {
    fail(field, "has " + std::to_string(m.size()) + " rows, expected " + std::to_string(rows));
  }
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = m[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      fail(field, "row " + std::to_string(i) + " has " + std::to_string(row.is_array() ? row.size() : 0) +
                      " entries, expected " + std::to_string(cols));
    }
    for (int j = 0; j < cols; ++j) {
      out(i, j) = read_entry(row[static_cast<std::size_t>(j)],
                             std::string(field) + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
  }
  return out;
}

bool is_real(const Matrix& m) { return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0; }

json real_or_pairs(const Matrix& m, bool pairs) {
  if (pairs) return matrix_to_json(m);
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ChannelSet parse_channel_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("channel file: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "channel file: top level must be an object");

  ChannelSet ch;
  ch.dims = {read_count(doc, "n_pt"), read_count(doc, "n_ct"), read_count(doc, "n_pr"), read_count(doc, "n_cr")};
  ch.h_pp = read_matrix(doc, "H_pp", ch.dims.n_pr, ch.dims.n_pt);
  ch.h_pc = read_matrix(doc, "H_pc", ch.dims.n_cr, ch.dims.n_pt);
  ch.h_cp = read_matrix(doc, "H_cp", ch.dims.n_pr, ch.dims.n_ct);
  ch.h_cc = read_matrix(doc, "H_cc", ch.dims.n_cr, ch.dims.n_ct);
  return validate(ch);
}

ChannelSet read_channel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open channel file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_channel_document(buffer.str());
}

std::string write_channel_document(const ChannelSet& ch, bool complex_pairs) {
  const bool pairs = complex_pairs || !(is_real(ch.h_pp) && is_real(ch.h_pc) && is_real(ch.h_cp) && is_real(ch.h_cc));
  json doc;
  doc["n_pt"] = ch.dims.n_pt;
  doc["n_ct"] = ch.dims.n_ct;
  doc["n_pr"] = ch.dims.n_pr;
  doc["n_cr"] = ch.dims.n_cr;
  doc["H_pp"] = real_or_pairs(ch.h_pp, pairs);
  doc["H_pc"] = real_or_pairs(ch.h_pc, pairs);
  doc["H_cp"] = real_or_pairs(ch.h_cp, pairs);
  doc["H_cc"] = real_or_pairs(ch.h_cc, pairs);
  return doc.dump(2) + "\n";
}

nlohmann::json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mcc::cli
