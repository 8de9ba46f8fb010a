// src/trials.cc

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

#include "voxpriv/trials.h"

#include <algorithm>
#include <set>

#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

std::size_t TrialSet::num_targets() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const TrialPair &p) {
        return p.label == TrialLabel::target;
      }));
}

std::vector<TrialPair> read_trial_pairs(const fs::path &path) {
  const std::string contents = read_file(path);
  std::vector<TrialPair> pairs;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_whitespace(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 3)
      throw VoxprivError(where + ": expected '<model-id> <utt-id> <label>'");
    TrialPair p;
    p.model = fields[0];
    p.utt = fields[1];
    p.label = parse_trial_label(fields[2]);
    if (!seen.emplace(p.model, p.utt).second)
      throw VoxprivError(where + ": duplicate trial pair (" + p.model + ", " +
                         p.utt + ")");
    pairs.push_back(std::move(p));
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

void write_trial_pairs(const std::vector<TrialPair> &pairs, const fs::path &path) {
  std::vector<TrialPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end());
  std::set<std::pair<std::string, std::string>> seen;
  std::string out;
  for (const auto &p : sorted) {
    if (!seen.emplace(p.model, p.utt).second)
      throw VoxprivError("write_trial_pairs: duplicate trial pair (" + p.model +
                         ", " + p.utt + ")");
    out += p.model;
    out += ' ';
    out += p.utt;
    out += ' ';
    out += to_string(p.label);
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::map<std::string, EnrollModel> read_enrollments(const fs::path &path) {
  const std::string contents = read_file(path);
  std::map<std::string, EnrollModel> models;
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_whitespace(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() < 4)
      throw VoxprivError(where +
                         ": expected '<model-id> <speaker> <gender> <utt>...'");
    EnrollModel m;
    m.speaker = fields[1];
    m.gender = parse_gender(fields[2]);
    m.enrollment_utts.assign(fields.begin() + 3, fields.end());
    if (!std::is_sorted(m.enrollment_utts.begin(), m.enrollment_utts.end()))
      std::sort(m.enrollment_utts.begin(), m.enrollment_utts.end());
    if (!models.emplace(fields[0], std::move(m)).second)
      throw VoxprivError(where + ": duplicate model id '" + fields[0] + "'");
  }
  return models;
}

void write_enrollments(const std::map<std::string, EnrollModel> &models,
                       const fs::path &path) {
  std::string out;
  for (const auto &[id, m] : models) {
    if (m.enrollment_utts.empty())
      throw VoxprivError("write_enrollments: model '" + id +
                         "' has no enrollment utterances");
    out += id;
    out += ' ';
    out += m.speaker;
    out += ' ';
    out += to_string(m.gender);
    std::vector<std::string> utts = m.enrollment_utts;
    std::sort(utts.begin(), utts.end());
    for (const auto &u : utts) {
      out += ' ';
      out += u;
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

TrialSet read_trial_set(const fs::path &pairs_path, const fs::path &enroll_path) {
  TrialSet set;
  set.pairs = read_trial_pairs(pairs_path);
  set.models = read_enrollments(enroll_path);
  for (const auto &p : set.pairs) {
    if (!set.models.count(p.model))
      throw VoxprivError(pairs_path.string() + ": pair references model '" +
                         p.model + "' absent from " + enroll_path.string());
  }
  return set;
}

void write_trial_set(const TrialSet &trials, const fs::path &pairs_path,
                     const fs::path &enroll_path) {
  for (const auto &p : trials.pairs) {
    if (!trials.models.count(p.model))
      throw VoxprivError("write_trial_set: pair references unknown model '" +
                         p.model + "'");
  }
  write_trial_pairs(trials.pairs, pairs_path);
  write_enrollments(trials.models, enroll_path);
}

}  // namespace voxpriv
