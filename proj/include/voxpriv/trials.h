// include/voxpriv/trials.h

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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "voxpriv/types.h"

namespace voxpriv {

struct EnrollModel {
  std::string speaker;
  Gender gender = Gender::female;
  std::vector<std::string> enrollment_utts;  // sorted

  bool operator==(const EnrollModel &) const = default;
};

struct TrialPair {
  std::string model;
  std::string utt;
  TrialLabel label = TrialLabel::nontarget;

  bool operator==(const TrialPair &) const = default;
  auto operator<=>(const TrialPair &) const = default;
};

// Enrollment models plus (model, trial utterance, label) pairs. Pairs are
// kept sorted by (model, utt); the pair file on disk holds exactly the
// pairs, the enrollment sidecar the models.
struct TrialSet {
  std::map<std::string, EnrollModel> models;
  std::vector<TrialPair> pairs;

  std::size_t num_targets() const;
  bool operator==(const TrialSet &) const = default;
};

// Trial pair file: one "<model-id> <utt-id> <target|nontarget>" per line,
// UTF-8, LF, lines sorted lexicographically on write. Rejects unknown label
// tokens and duplicate (model, utt) pairs, with line numbers.
std::vector<TrialPair> read_trial_pairs(const std::filesystem::path &path);
void write_trial_pairs(const std::vector<TrialPair> &pairs,
                       const std::filesystem::path &path);

// Enrollment sidecar: "<model-id> <speaker> <female|male> <utt>..." per
// line, models and utterances sorted.
std::map<std::string, EnrollModel> read_enrollments(const std::filesystem::path &path);
void write_enrollments(const std::map<std::string, EnrollModel> &models,
                       const std::filesystem::path &path);

TrialSet read_trial_set(const std::filesystem::path &pairs_path,
                        const std::filesystem::path &enroll_path);
void write_trial_set(const TrialSet &trials,
                     const std::filesystem::path &pairs_path,
                     const std::filesystem::path &enroll_path);

}  // namespace voxpriv
