// include/voxpriv/util.h

// Copyright 2026  Voxpriv Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace voxpriv {

std::vector<std::string> split_fields(std::string_view line, char sep);
std::vector<std::string> split_whitespace(std::string_view line);
std::string_view trim(std::string_view s);

// Strict numeric parsing: the whole field must be consumed.
double parse_double(std::string_view s, const std::string &context);
int64_t parse_int(std::string_view s, const std::string &context);

// Formats a double with 9 significant digits, the precision used by all
// text score outputs; parse(format(x)) followed by format is a fixed point.
std::string format_score(double value);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path &path);
// For a directory, hashes the sorted list of (relative path, file hash)
// pairs so the value is independent of traversal order.
std::string sha256_path(const std::filesystem::path &path);

std::string read_file(const std::filesystem::path &path);
// Writes via a temp file and rename so readers never observe partial files.
void write_file_atomic(const std::filesystem::path &path, std::string_view contents);

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
};

// Runs `command` through /bin/sh with stdout+stderr appended to log_path.
// timeout_s <= 0 means no timeout; on timeout the process group is killed.
CommandResult run_command(const std::string &command,
                          const std::filesystem::path &log_path,
                          double timeout_s);

// Static partition of [0, n) over at most `jobs` threads. Results must be
// written by index so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &fn);

int default_jobs();

}  // namespace voxpriv
