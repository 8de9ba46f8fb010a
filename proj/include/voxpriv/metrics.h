// include/voxpriv/metrics.h

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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "voxpriv/embedding.h"
#include "voxpriv/io.h"
#include "voxpriv/trials.h"
#include "voxpriv/types.h"

namespace voxpriv {

// Cosine scores for every trial pair. Each model vector is the
// renormalized mean of its enrollment embeddings. Missing embeddings abort
// with the sorted list of offending ids. Scores come out in pair order
// regardless of `jobs`.
std::vector<TrialScore> score_trials(const TrialSet &trials,
                                     const EmbeddingTable &embeddings,
                                     int jobs = 1);

struct EerResult {
  double eer = 0.0;        // raw, in [0, 1]
  double threshold = 0.0;  // score at the FAR/FRR crossing
};

// Equal error rate of the two score sets. FAR(t) is the fraction of
// nontargets >= t, FRR(t) the fraction of targets < t; the EER is read off
// where the two step functions cross, linearly interpolating in (FAR, FRR)
// space between the adjacent operating points that bracket the crossing.
// Sweeping past the largest score lands on the virtual operating point
// (FAR, FRR) = (0, 1), so a bracket always exists. Interpolating in ROC
// space (not score space) keeps the value invariant under strictly
// increasing score transforms.
EerResult compute_eer(std::vector<double> target_scores,
                      std::vector<double> nontarget_scores);

struct ReportedEer {
  double reported = 0.0;  // in [0, 0.5]
  bool flipped = false;
};

// min(raw, 1 - raw): above 50% the verifier could learn to invert its
// decisions, so 1 - EER is reported instead.
ReportedEer flip_rule(double raw_eer);

double gender_average(double eer_female, double eer_male);

struct EditCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;

  int64_t total() const { return substitutions + deletions + insertions; }
  EditCounts &operator+=(const EditCounts &o);
  bool operator==(const EditCounts &) const = default;
};

// Minimal unit-cost edit operations turning `ref` into `hyp`; ties prefer
// substitutions, then deletions. The total always equals the Levenshtein
// distance.
EditCounts edit_distance(std::span<const std::string> ref,
                         std::span<const std::string> hyp);

struct UtteranceErrors {
  std::string utt;
  EditCounts counts;
  int64_t ref_len = 0;
};

struct ErrorRateResult {
  EditCounts counts;
  int64_t ref_tokens = 0;
  std::vector<UtteranceErrors> per_utt;  // sorted by utterance id

  // Corpus-pooled rate: total errors over total reference tokens. May
  // exceed 1.0 when insertions dominate.
  double rate() const;
};

using TextNormalizer = std::function<std::string(const std::string &)>;

// Corpus word error rate over identical utterance key sets, normalizing
// both sides with `normalizer` (normalize_text by default) and splitting
// on whitespace. Pooled, not averaged per utterance.
ErrorRateResult compute_wer(const TranscriptSet &refs, const TranscriptSet &hyps,
                            const TextNormalizer &normalizer, int jobs = 1);
ErrorRateResult compute_wer(const TranscriptSet &refs, const TranscriptSet &hyps,
                            int jobs = 1);

// Same computation over the phone token fields, without text
// normalization. Throws listing utterances whose phones are missing.
ErrorRateResult compute_per(const TranscriptSet &refs, const TranscriptSet &hyps,
                            int jobs = 1);

// Splits scores into (target, nontarget) value vectors.
std::pair<std::vector<double>, std::vector<double>> split_by_label(
    const std::vector<TrialScore> &scores);

}  // namespace voxpriv
