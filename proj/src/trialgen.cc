// src/trialgen.cc

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

#include "voxpriv/trialgen.h"

#include <algorithm>
#include <cmath>

namespace voxpriv {

void TrialGenConfig::validate() const {
  if (enroll_speakers_per_gender < 0)
    throw VoxprivError("trialgen config: enroll_speakers_per_gender must be >= 0");
  if (extra_trial_speakers_per_gender < 0)
    throw VoxprivError("trialgen config: extra_trial_speakers_per_gender must be >= 0");
  if (utterance_cap && *utterance_cap < 1)
    throw VoxprivError("trialgen config: utterance_cap must be >= 1");
  if (!(enroll_fraction > 0.0 && enroll_fraction < 1.0))
    throw VoxprivError("trialgen config: enroll_fraction must be in (0, 1)");
  if (enroll_min < 1)
    throw VoxprivError("trialgen config: enroll_min must be >= 1");
}

TrialGenConfig TrialGenConfig::defaults_for(Dataset dataset) {
  TrialGenConfig config;
  if (dataset == Dataset::cv) config.utterance_cap = 70;
  return config;
}

namespace {

// Enrollment size for a speaker with n utterances. Used both by the
// eligibility filter and by split_enrollment so they can never disagree.
std::size_t enrollment_count(std::size_t n, const TrialGenConfig &config) {
  const auto by_fraction = static_cast<std::size_t>(
      std::ceil(config.enroll_fraction * static_cast<double>(n)));
  return std::max(by_fraction, static_cast<std::size_t>(config.enroll_min));
}

bool speaker_eligible(std::size_t n, const TrialGenConfig &config) {
  if (n < static_cast<std::size_t>(config.enroll_min) + 1) return false;
  return enrollment_count(n, config) < n;  // at least one trial utterance left
}

}  // namespace

std::vector<UtteranceRecord> cap_utterances(std::vector<UtteranceRecord> records,
                                            int cap, SubstreamRng &rng) {
  if (cap < 1) throw VoxprivError("cap_utterances: cap must be >= 1");
  std::sort(records.begin(), records.end(),
            [](const UtteranceRecord &a, const UtteranceRecord &b) {
              return a.utt < b.utt;
            });
  const std::size_t n = records.size();
  const auto cap_n = static_cast<std::size_t>(cap);
  if (n <= cap_n) return records;

  auto keep = rng.sample_indices(n, cap_n);
  std::sort(keep.begin(), keep.end());
  std::vector<UtteranceRecord> kept;
  kept.reserve(cap_n);
  for (std::size_t idx : keep) kept.push_back(std::move(records[idx]));
  return kept;
}

SpeakerSelection select_speakers(
    const std::map<Gender, std::vector<std::string>> &eligible_by_gender,
    const TrialGenConfig &config, const LanguageTag &language, uint64_t seed) {
  config.validate();
  SpeakerSelection selection;
  for (const auto &[gender, speakers_in] : eligible_by_gender) {
    if (speakers_in.empty())
      throw VoxprivError("select_speakers: no eligible " +
                         std::string(to_string(gender)) + " speakers for language '" +
                         language.str() + "'");
    std::vector<std::string> speakers = speakers_in;
    std::sort(speakers.begin(), speakers.end());
    if (std::adjacent_find(speakers.begin(), speakers.end()) != speakers.end())
      throw VoxprivError("select_speakers: duplicate speaker id in eligible list");

    GenderSelection out;
    const std::size_t enroll = static_cast<std::size_t>(config.enroll_speakers_per_gender);
    const std::size_t total = enroll +
        static_cast<std::size_t>(config.extra_trial_speakers_per_gender);
    if (speakers.size() < total) {
      // Small-test-set fallback: every speaker serves both roles.
      out.enrollment = speakers;
      out.all_speakers = true;
    } else {
      SubstreamRng rng(seed, {"trialgen", "select", language.str(),
                              to_string(gender)});
      const auto idx = rng.sample_indices(speakers.size(), total);
      for (std::size_t i = 0; i < enroll; ++i)
        out.enrollment.push_back(speakers[idx[i]]);
      for (std::size_t i = enroll; i < total; ++i)
        out.trial_only.push_back(speakers[idx[i]]);
    }
    selection.per_gender.emplace(gender, std::move(out));
  }
  return selection;
}

std::optional<EnrollmentSplit> split_enrollment(const std::vector<std::string> &utts,
                                                const TrialGenConfig &config,
                                                SubstreamRng &rng) {
  config.validate();
  std::vector<std::string> sorted = utts;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (!speaker_eligible(n, config)) return std::nullopt;

  const std::size_t k = enrollment_count(n, config);
  auto idx = rng.sample_indices(n, k);
  std::sort(idx.begin(), idx.end());

  EnrollmentSplit split;
  split.enrollment.reserve(k);
  split.trial.reserve(n - k);
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (next < idx.size() && idx[next] == i) {
      split.enrollment.push_back(sorted[i]);
      ++next;
    } else {
      split.trial.push_back(sorted[i]);
    }
  }
  return split;
}

TrialSet build_trials(
    const SpeakerSelection &selection,
    const std::map<std::string, EnrollmentSplit> &splits,
    const std::map<std::string, std::vector<std::string>> &trial_only_utts,
    const std::map<std::string, Gender> &speaker_gender) {
  TrialSet set;
  // Trial pool per gender: (utt, owning speaker).
  std::map<Gender, std::vector<std::pair<std::string, std::string>>> pools;

  for (const auto &[gender, gsel] : selection.per_gender) {
    auto &pool = pools[gender];
    for (const auto &speaker : gsel.enrollment) {
      const auto split_it = splits.find(speaker);
      if (split_it == splits.end())
        throw VoxprivError("build_trials: no enrollment split for speaker '" +
                           speaker + "'");
      const EnrollmentSplit &split = split_it->second;
      if (split.enrollment.empty() || split.trial.empty())
        throw VoxprivError("build_trials: degenerate split for speaker '" +
                           speaker + "'");
      EnrollModel model;
      model.speaker = speaker;
      model.gender = gender;
      model.enrollment_utts = split.enrollment;
      std::sort(model.enrollment_utts.begin(), model.enrollment_utts.end());
      if (!set.models.emplace(speaker, std::move(model)).second)
        throw VoxprivError("build_trials: speaker '" + speaker +
                           "' selected twice");
      for (const auto &utt : split.trial) pool.emplace_back(utt, speaker);
    }
    for (const auto &speaker : gsel.trial_only) {
      const auto utts_it = trial_only_utts.find(speaker);
      if (utts_it == trial_only_utts.end() || utts_it->second.empty())
        throw VoxprivError("build_trials: no trial utterances for trial-only "
                           "speaker '" + speaker + "'");
      for (const auto &utt : utts_it->second) pool.emplace_back(utt, speaker);
    }
    if (!gsel.enrollment.empty() && pool.empty())
      throw VoxprivError("build_trials: empty trial pool for " +
                         std::string(to_string(gender)) + " models");
  }

  // Gender-pure Cartesian product of models and pool utterances.
  for (const auto &[model_id, model] : set.models) {
    for (const auto &[utt, speaker] : pools.at(model.gender)) {
      TrialPair pair;
      pair.model = model_id;
      pair.utt = utt;
      pair.label = (speaker == model.speaker) ? TrialLabel::target
                                              : TrialLabel::nontarget;
      (void)speaker_gender;  // pool construction already enforces gender purity
      set.pairs.push_back(std::move(pair));
    }
  }
  std::sort(set.pairs.begin(), set.pairs.end());
  return set;
}

TrialGenResult generate_trials(const Manifest &manifest, const TrialGenConfig &config) {
  config.validate();
  manifest.validate();
  const std::map<std::string, Gender> genders = manifest.speaker_genders();

  // Utterances per speaker (record order does not matter; everything below
  // re-sorts by utt id).
  std::map<std::string, std::vector<UtteranceRecord>> by_speaker;
  for (const auto &rec : manifest.records) by_speaker[rec.speaker].push_back(rec);

  const std::string &lang = manifest.language.str();

  std::map<std::string, std::vector<std::string>> utts_of;  // after capping
  for (auto &[speaker, records] : by_speaker) {
    std::vector<UtteranceRecord> capped;
    if (config.utterance_cap) {
      SubstreamRng rng(config.seed, {"trialgen", "cap", lang,
                                     to_string(genders.at(speaker)), speaker});
      capped = cap_utterances(std::move(records), *config.utterance_cap, rng);
    } else {
      capped = std::move(records);
      std::sort(capped.begin(), capped.end(),
                [](const UtteranceRecord &a, const UtteranceRecord &b) {
                  return a.utt < b.utt;
                });
    }
    auto &utts = utts_of[speaker];
    utts.reserve(capped.size());
    for (const auto &rec : capped) utts.push_back(rec.utt);
  }

  // Eligibility filter; excluded speakers take part in neither role.
  std::map<Gender, std::vector<std::string>> eligible_by_gender;
  std::map<Gender, std::size_t> excluded_by_gender;
  for (const auto &[speaker, utts] : utts_of) {
    const Gender g = genders.at(speaker);
    if (speaker_eligible(utts.size(), config))
      eligible_by_gender[g].push_back(speaker);
    else
      ++excluded_by_gender[g];
  }
  if (eligible_by_gender.empty())
    throw VoxprivError("generate_trials: no eligible speakers in manifest");
  // A gender that exists in the manifest but lost all its speakers to the
  // eligibility filter is an error, not a silent drop: the per-gender
  // protocol cannot be fulfilled for it.
  for (const auto &[speaker, g] : genders) {
    if (!eligible_by_gender.count(g))
      throw VoxprivError("generate_trials: no eligible " +
                         std::string(to_string(g)) +
                         " speakers (all below the minimum utterance count)");
  }

  const SpeakerSelection selection =
      select_speakers(eligible_by_gender, config, manifest.language, config.seed);

  std::map<std::string, EnrollmentSplit> splits;
  std::map<std::string, std::vector<std::string>> trial_only_utts;
  for (const auto &[gender, gsel] : selection.per_gender) {
    for (const auto &speaker : gsel.enrollment) {
      SubstreamRng rng(config.seed, {"trialgen", "split", lang,
                                     to_string(gender), speaker});
      auto split = split_enrollment(utts_of.at(speaker), config, rng);
      if (!split)
        throw VoxprivError("generate_trials: selected speaker '" + speaker +
                           "' became ineligible");
      splits.emplace(speaker, std::move(*split));
    }
    for (const auto &speaker : gsel.trial_only)
      trial_only_utts.emplace(speaker, utts_of.at(speaker));
  }

  TrialGenResult result;
  result.trials = build_trials(selection, splits, trial_only_utts, genders);

  // Per-gender tallies for the JSON summary.
  nlohmann::json gender_summary = nlohmann::json::object();
  std::size_t total_excluded = 0;
  for (const auto &[gender, gsel] : selection.per_gender) {
    std::size_t pairs = 0, targets = 0;
    for (const auto &pair : result.trials.pairs) {
      if (result.trials.models.at(pair.model).gender != gender) continue;
      ++pairs;
      if (pair.label == TrialLabel::target) ++targets;
    }
    const std::size_t excluded = excluded_by_gender.count(gender)
                                     ? excluded_by_gender.at(gender)
                                     : 0;
    total_excluded += excluded;
    gender_summary[std::string(to_string(gender))] = {
        {"models", gsel.enrollment.size()},
        {"trial_only_speakers", gsel.trial_only.size()},
        {"pairs", pairs},
        {"targets", targets},
        {"excluded_speakers", excluded},
        {"all_speakers", gsel.all_speakers},
    };
  }
  // Excluded speakers of a gender with no eligible speakers at all would not
  // appear above; fold them into the total.
  for (const auto &[gender, count] : excluded_by_gender) {
    if (!selection.per_gender.count(gender)) total_excluded += count;
  }

  result.summary = {
      {"dataset", std::string(to_string(manifest.dataset))},
      {"language", lang},
      {"seed", config.seed},
      {"genders", gender_summary},
      {"models", result.trials.models.size()},
      {"pairs", result.trials.pairs.size()},
      {"targets", result.trials.num_targets()},
      {"excluded_speakers", total_excluded},
  };
  return result;
}

}  // namespace voxpriv
