// src/metrics.cc

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

#include "voxpriv/metrics.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "voxpriv/textnorm.h"
#include "voxpriv/util.h"

namespace voxpriv {

namespace {

std::string join_ids(const std::set<std::string> &ids, std::size_t limit = 8) {
  std::string out;
  std::size_t shown = 0;
  for (const auto &id : ids) {
    if (shown == limit) {
      out += ", ... (" + std::to_string(ids.size() - limit) + " more)";
      break;
    }
    if (shown) out += ", ";
    out += id;
    ++shown;
  }
  return out;
}

}  // namespace

std::vector<TrialScore> score_trials(const TrialSet &trials,
                                     const EmbeddingTable &embeddings,
                                     int jobs) {
  std::set<std::string> missing;
  for (const auto &[id, model] : trials.models) {
    for (const auto &utt : model.enrollment_utts)
      if (!embeddings.find(utt)) missing.insert(utt);
  }
  for (const auto &pair : trials.pairs) {
    if (!embeddings.find(pair.utt)) missing.insert(pair.utt);
    if (!trials.models.count(pair.model))
      throw VoxprivError("score_trials: pair references unknown model '" +
                         pair.model + "'");
  }
  if (!missing.empty())
    throw VoxprivError("score_trials: missing embeddings for: " +
                       join_ids(missing));

  std::map<std::string, EmbeddingVector> model_vecs;
  for (const auto &[id, model] : trials.models) {
    if (model.enrollment_utts.empty())
      throw VoxprivError("score_trials: model '" + id +
                         "' has no enrollment utterances");
    std::vector<const EmbeddingVector *> vecs;
    vecs.reserve(model.enrollment_utts.size());
    for (const auto &utt : model.enrollment_utts)
      vecs.push_back(embeddings.find(utt));
    model_vecs.emplace(id, mean_embedding(vecs));
  }

  std::vector<TrialScore> scores(trials.pairs.size());
  parallel_for(trials.pairs.size(), jobs, [&](std::size_t i) {
    const TrialPair &pair = trials.pairs[i];
    TrialScore &s = scores[i];
    s.model = pair.model;
    s.utt = pair.utt;
    s.label = pair.label;
    s.value = cosine_similarity(model_vecs.at(pair.model), *embeddings.find(pair.utt));
  });
  return scores;
}

EerResult compute_eer(std::vector<double> target_scores,
                      std::vector<double> nontarget_scores) {
  if (target_scores.empty()) throw VoxprivError("compute_eer: no target scores");
  if (nontarget_scores.empty())
    throw VoxprivError("compute_eer: no nontarget scores");
  for (double v : target_scores)
    if (!std::isfinite(v)) throw VoxprivError("compute_eer: non-finite target score");
  for (double v : nontarget_scores)
    if (!std::isfinite(v))
      throw VoxprivError("compute_eer: non-finite nontarget score");

  std::sort(target_scores.begin(), target_scores.end());
  std::sort(nontarget_scores.begin(), nontarget_scores.end());

  std::vector<double> thresholds;
  thresholds.reserve(target_scores.size() + nontarget_scores.size());
  thresholds.insert(thresholds.end(), target_scores.begin(), target_scores.end());
  thresholds.insert(thresholds.end(), nontarget_scores.begin(),
                    nontarget_scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  const double n_t = static_cast<double>(target_scores.size());
  const double n_n = static_cast<double>(nontarget_scores.size());

  // Operating point at threshold t: accept iff score >= t.
  auto far_at = [&](double t) {
    const auto below = std::lower_bound(nontarget_scores.begin(),
                                        nontarget_scores.end(), t) -
                       nontarget_scores.begin();
    return (n_n - static_cast<double>(below)) / n_n;
  };
  auto frr_at = [&](double t) {
    const auto below = std::lower_bound(target_scores.begin(),
                                        target_scores.end(), t) -
                       target_scores.begin();
    return static_cast<double>(below) / n_t;
  };

  // Sweep thresholds upward; diff = FAR - FRR starts at 1 (everything is
  // accepted at the minimum score) and the virtual end point (FAR, FRR) =
  // (0, 1) closes the sweep, so a sign change is guaranteed.
  double prev_far = 0.0, prev_frr = 0.0, prev_t = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i <= thresholds.size(); ++i) {
    const bool virtual_end = (i == thresholds.size());
    const double t = virtual_end ? thresholds.back() : thresholds[i];
    const double far = virtual_end ? 0.0 : far_at(t);
    const double frr = virtual_end ? 1.0 : frr_at(t);
    const double diff = far - frr;
    if (diff > 0.0) {
      prev_far = far;
      prev_frr = frr;
      prev_t = t;
      have_prev = true;
      continue;
    }
    if (diff == 0.0) return {far, t};
    if (!have_prev)
      // diff at the smallest threshold is always 1; this cannot happen.
      throw VoxprivError("compute_eer: no bracketing operating point");
    const double prev_diff = prev_far - prev_frr;
    const double alpha = prev_diff / (prev_diff - diff);
    const double eer = prev_far + alpha * (far - prev_far);
    const double threshold = prev_t + alpha * (t - prev_t);
    return {eer, threshold};
  }
  throw VoxprivError("compute_eer: sweep ended without a crossing");
}

ReportedEer flip_rule(double raw_eer) {
  if (!(raw_eer >= 0.0 && raw_eer <= 1.0))
    throw VoxprivError("flip_rule: raw EER must be in [0, 1]");
  ReportedEer out;
  out.reported = std::min(raw_eer, 1.0 - raw_eer);
  out.flipped = raw_eer > 0.5;
  return out;
}

double gender_average(double eer_female, double eer_male) {
  return (eer_female + eer_male) / 2.0;
}

EditCounts &EditCounts::operator+=(const EditCounts &o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  return *this;
}

EditCounts edit_distance(std::span<const std::string> ref,
                         std::span<const std::string> hyp) {
  const std::size_t r = ref.size(), h = hyp.size();
  // Rolling rows of (counts) cells; candidate order diag, deletion,
  // insertion with strict improvement implements the tie preference
  // substitutions > deletions > insertions.
  std::vector<EditCounts> prev(h + 1), cur(h + 1);
  for (std::size_t j = 1; j <= h; ++j)
    prev[j].insertions = static_cast<int64_t>(j);
  for (std::size_t i = 1; i <= r; ++i) {
    cur[0] = EditCounts{};
    cur[0].deletions = static_cast<int64_t>(i);
    for (std::size_t j = 1; j <= h; ++j) {
      EditCounts best = prev[j - 1];
      if (ref[i - 1] != hyp[j - 1]) ++best.substitutions;
      EditCounts del = prev[j];
      ++del.deletions;
      if (del.total() < best.total()) best = del;
      EditCounts ins = cur[j - 1];
      ++ins.insertions;
      if (ins.total() < best.total()) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[h];
}

double ErrorRateResult::rate() const {
  if (ref_tokens <= 0)
    throw VoxprivError("error rate undefined: zero reference tokens");
  return static_cast<double>(counts.total()) / static_cast<double>(ref_tokens);
}

namespace {

void require_same_keys(const TranscriptSet &refs, const TranscriptSet &hyps,
                       const char *what) {
  std::set<std::string> only_ref, only_hyp;
  for (const auto &[utt, entry] : refs.entries)
    if (!hyps.entries.count(utt)) only_ref.insert(utt);
  for (const auto &[utt, entry] : hyps.entries)
    if (!refs.entries.count(utt)) only_hyp.insert(utt);
  if (!only_ref.empty() || !only_hyp.empty()) {
    std::string msg = std::string(what) + ": utterance key mismatch";
    if (!only_ref.empty()) msg += "; only in refs: " + join_ids(only_ref);
    if (!only_hyp.empty()) msg += "; only in hyps: " + join_ids(only_hyp);
    throw VoxprivError(msg);
  }
  if (refs.entries.empty())
    throw VoxprivError(std::string(what) + ": empty transcript sets");
}

ErrorRateResult pooled_error_rate(
    const std::vector<std::string> &utts,
    const std::vector<std::vector<std::string>> &ref_tokens,
    const std::vector<std::vector<std::string>> &hyp_tokens, int jobs) {
  ErrorRateResult result;
  result.per_utt.resize(utts.size());
  parallel_for(utts.size(), jobs, [&](std::size_t i) {
    UtteranceErrors &u = result.per_utt[i];
    u.utt = utts[i];
    u.counts = edit_distance(ref_tokens[i], hyp_tokens[i]);
    u.ref_len = static_cast<int64_t>(ref_tokens[i].size());
  });
  for (const auto &u : result.per_utt) {
    result.counts += u.counts;
    result.ref_tokens += u.ref_len;
  }
  return result;
}

}  // namespace

ErrorRateResult compute_wer(const TranscriptSet &refs, const TranscriptSet &hyps,
                            const TextNormalizer &normalizer, int jobs) {
  require_same_keys(refs, hyps, "compute_wer");
  std::vector<std::string> utts;
  utts.reserve(refs.entries.size());
  for (const auto &[utt, entry] : refs.entries) utts.push_back(utt);

  std::vector<std::vector<std::string>> ref_tokens(utts.size());
  std::vector<std::vector<std::string>> hyp_tokens(utts.size());
  parallel_for(utts.size(), jobs, [&](std::size_t i) {
    ref_tokens[i] = split_whitespace(normalizer(refs.entries.at(utts[i]).text));
    hyp_tokens[i] = split_whitespace(normalizer(hyps.entries.at(utts[i]).text));
  });
  return pooled_error_rate(utts, ref_tokens, hyp_tokens, jobs);
}

ErrorRateResult compute_wer(const TranscriptSet &refs, const TranscriptSet &hyps,
                            int jobs) {
  return compute_wer(refs, hyps,
                     [](const std::string &s) { return normalize_text(s); }, jobs);
}

ErrorRateResult compute_per(const TranscriptSet &refs, const TranscriptSet &hyps,
                            int jobs) {
  require_same_keys(refs, hyps, "compute_per");
  std::set<std::string> missing;
  for (const auto &[utt, entry] : refs.entries)
    if (trim(entry.phones).empty()) missing.insert(utt);
  for (const auto &[utt, entry] : hyps.entries)
    if (trim(entry.phones).empty()) missing.insert(utt);
  if (!missing.empty())
    throw VoxprivError("compute_per: missing phone fields for: " +
                       join_ids(missing));

  std::vector<std::string> utts;
  utts.reserve(refs.entries.size());
  for (const auto &[utt, entry] : refs.entries) utts.push_back(utt);

  std::vector<std::vector<std::string>> ref_tokens(utts.size());
  std::vector<std::vector<std::string>> hyp_tokens(utts.size());
  parallel_for(utts.size(), jobs, [&](std::size_t i) {
    ref_tokens[i] = split_whitespace(refs.entries.at(utts[i]).phones);
    hyp_tokens[i] = split_whitespace(hyps.entries.at(utts[i]).phones);
  });
  return pooled_error_rate(utts, ref_tokens, hyp_tokens, jobs);
}

std::pair<std::vector<double>, std::vector<double>> split_by_label(
    const std::vector<TrialScore> &scores) {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto &s : scores) {
    if (s.label == TrialLabel::target)
      out.first.push_back(s.value);
    else
      out.second.push_back(s.value);
  }
  return out;
}

}  // namespace voxpriv
