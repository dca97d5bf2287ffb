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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mcc/channel.hpp"

namespace mcc::cli {

/// Parses a channel document:
///   {"n_pt": 1, "n_ct": 1, "n_pr": 2, "n_cr": 2,
///    "H_pp": [[-0.4326], [0.1253]], ...}
/// Each matrix is an array of rows; each entry is a number or an [re, im] pair.
/// Throws Error(kParse) naming the offending field, or the validate() errors.
ChannelSet parse_channel_document(const std::string& text);

/// Throws Error(kIo) if the file cannot be read.
ChannelSet read_channel_file(const std::filesystem::path& path);

/// Serializes channels. Real matrices are written as plain numbers unless
/// `complex_pairs` is set, in which case every entry is an [re, im] pair.
std::string write_channel_document(const ChannelSet& channels, bool complex_pairs);

/// Row-major array of [re, im] pairs.
nlohmann::json matrix_to_json(const Matrix& m);

}  // namespace mcc::cli
