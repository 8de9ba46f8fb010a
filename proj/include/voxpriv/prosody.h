// include/voxpriv/prosody.h

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

namespace voxpriv {

// Phone-wise pitch / energy / duration values for one utterance. All lists
// share the same length >= 1; pitch and energy are >= 0 (pitch 0 marks an
// unvoiced phone), duration is > 0.
struct ProsodySequence {
  std::vector<std::string> phone_labels;
  std::vector<double> pitch;     // Hz
  std::vector<double> energy;
  std::vector<double> duration;  // unit declared below, not persisted
  std::string duration_unit = "frames";

  std::size_t size() const { return phone_labels.size(); }
  void validate() const;
};

struct ProsodyStats {
  double pitch_mean = 0.0;   // over voiced (nonzero) entries only
  double energy_mean = 0.0;  // over all entries
  double duration_mean = 0.0;
};

struct NormalizedProsody {
  ProsodySequence seq;
  ProsodyStats stats;
};

// Divides each channel by its sequence mean so speaker-specific ranges
// drop out. Unvoiced (zero) pitch entries are excluded from the pitch mean
// and stay exactly 0. Throws when a channel's normalization mean is 0.
NormalizedProsody normalize(const ProsodySequence &seq);

// Exact inverse of normalize given the recorded stats.
ProsodySequence denormalize(const NormalizedProsody &norm);

// Prosody TSV: "utt-id \t phone \t pitch \t energy \t duration", one row
// per phone, rows of one utterance contiguous. Stats sidecar:
// "utt-id \t pitch-mean \t energy-mean \t duration-mean".
std::map<std::string, ProsodySequence> read_prosody(const std::filesystem::path &path);
void write_prosody(const std::map<std::string, ProsodySequence> &sequences,
                   const std::filesystem::path &path);
std::map<std::string, ProsodyStats> read_prosody_stats(const std::filesystem::path &path);
void write_prosody_stats(const std::map<std::string, ProsodyStats> &stats,
                         const std::filesystem::path &path);

}  // namespace voxpriv
