// include/voxpriv/trialgen.h

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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxpriv/manifest.h"
#include "voxpriv/rng.h"
#include "voxpriv/trials.h"
#include "voxpriv/types.h"

#include "json.hpp"

namespace voxpriv {

// Trial construction protocol: per gender, pick enrollment speakers plus
// extra trial-only speakers; cap utterances per speaker (CV only); split
// each enrollment speaker's utterances into an enrollment part of size
// max(ceil(enroll_fraction * n), enroll_min) and a trial part; expand
// trials as the full same-gender Cartesian product of models and trial
// utterances.
//
// All sampling runs on SubstreamRng streams keyed by
//   (seed, "trialgen", <purpose>, language, gender[, speaker])
// with purpose one of "select", "cap", "split", so regeneration is
// bit-identical and adding a speaker does not reshuffle the draws of the
// others.
struct TrialGenConfig {
  int enroll_speakers_per_gender = 10;
  int extra_trial_speakers_per_gender = 5;
  std::optional<int> utterance_cap;  // 70 for CV, unset for Libri
  double enroll_fraction = 0.15;
  int enroll_min = 5;
  uint64_t seed = 0;

  void validate() const;
  static TrialGenConfig defaults_for(Dataset dataset);
};

struct GenderSelection {
  std::vector<std::string> enrollment;  // selection order
  std::vector<std::string> trial_only;
  // Set when fewer eligible speakers exist than requested: every speaker
  // then serves both enrollment and trial (the small-test-set fallback).
  bool all_speakers = false;
};

struct SpeakerSelection {
  std::map<Gender, GenderSelection> per_gender;
};

struct EnrollmentSplit {
  std::vector<std::string> enrollment;
  std::vector<std::string> trial;
};

// Keeps a seeded uniform sample of exactly `cap` records when a speaker has
// more, otherwise returns the records unchanged. Selection is over records
// sorted by utterance id; the kept records stay in sorted order.
std::vector<UtteranceRecord> cap_utterances(std::vector<UtteranceRecord> records,
                                            int cap, SubstreamRng &rng);

// Seeded choice of enrollment + trial-only speakers per gender from the
// speakers eligible for enrollment (at least enroll_min + 1 utterances
// after capping). Falls back to all-speakers mode per gender when there are
// fewer eligible speakers than requested. Throws if a gender has none.
SpeakerSelection select_speakers(
    const std::map<Gender, std::vector<std::string>> &eligible_by_gender,
    const TrialGenConfig &config, const LanguageTag &language, uint64_t seed);

// Splits one speaker's utterances (sorted ids) into enrollment and trial.
// Returns nullopt when the speaker has fewer than enroll_min + 1
// utterances; such speakers are excluded and reported, never half-used.
std::optional<EnrollmentSplit> split_enrollment(const std::vector<std::string> &utts,
                                                const TrialGenConfig &config,
                                                SubstreamRng &rng);

// Cartesian expansion: one model per enrollment speaker, paired with every
// same-gender trial utterance; label is target iff the speakers match.
// Pairs come out sorted by (model, utt). Throws if a gender with models has
// an empty trial pool.
TrialSet build_trials(
    const SpeakerSelection &selection,
    const std::map<std::string, EnrollmentSplit> &splits,
    const std::map<std::string, std::vector<std::string>> &trial_only_utts,
    const std::map<std::string, Gender> &speaker_gender);

struct TrialGenResult {
  TrialSet trials;
  nlohmann::json summary;  // per-gender models/pairs/targets/excluded counts
};

// The whole pipeline: cap -> eligibility -> select -> split -> build.
TrialGenResult generate_trials(const Manifest &manifest, const TrialGenConfig &config);

}  // namespace voxpriv
