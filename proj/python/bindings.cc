// python/bindings.cc

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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "voxpriv/anonymize.h"
#include "voxpriv/embedding.h"
#include "voxpriv/io.h"
#include "voxpriv/metrics.h"
#include "voxpriv/prosody.h"
#include "voxpriv/rng.h"
#include "voxpriv/textnorm.h"
#include "voxpriv/types.h"

namespace py = pybind11;

namespace {

using namespace voxpriv;

TranscriptSet make_set(const std::map<std::string, std::string> &texts,
                       TranscriptSource source) {
  TranscriptSet set;
  set.source = source;
  for (const auto &[utt, text] : texts) {
    TranscriptEntry entry;
    entry.text = text;
    set.entries.emplace(utt, std::move(entry));
  }
  return set;
}

py::dict rate_dict(const ErrorRateResult &result, const char *rate_key) {
  py::dict d;
  d[rate_key] = result.rate();
  d["substitutions"] = result.counts.substitutions;
  d["deletions"] = result.counts.deletions;
  d["insertions"] = result.counts.insertions;
  d["ref_tokens"] = result.ref_tokens;
  return d;
}

}  // namespace

PYBIND11_MODULE(_voxpriv, m) {
  m.doc() = "speaker anonymization evaluation toolkit (C++ core)";

  py::register_exception<VoxprivError>(m, "VoxprivError");

  m.def(
      "cosine_similarity",
      [](const std::vector<double> &a, const std::vector<double> &b) {
        return cosine_similarity(EmbeddingVector(a), EmbeddingVector(b));
      },
      py::arg("a"), py::arg("b"),
      "Cosine similarity of two embedding vectors, clamped to [-1, 1].");

  m.def(
      "cosine_distance",
      [](const std::vector<double> &a, const std::vector<double> &b) {
        return cosine_distance(EmbeddingVector(a), EmbeddingVector(b));
      },
      py::arg("a"), py::arg("b"), "1 - cosine_similarity(a, b), in [0, 2].");

  m.def(
      "mean_embedding",
      [](const std::vector<std::vector<double>> &vectors) {
        std::vector<EmbeddingVector> owned;
        owned.reserve(vectors.size());
        for (const auto &v : vectors) owned.emplace_back(v);
        std::vector<const EmbeddingVector *> ptrs;
        ptrs.reserve(owned.size());
        for (const auto &v : owned) ptrs.push_back(&v);
        const auto mean = mean_embedding(ptrs);
        return std::vector<double>(mean.values().begin(), mean.values().end());
      },
      py::arg("vectors"), "Renormalized mean of the given embedding vectors.");

  m.def(
      "compute_eer",
      [](std::vector<double> targets, std::vector<double> nontargets) {
        const EerResult r = compute_eer(std::move(targets), std::move(nontargets));
        return py::make_tuple(r.eer, r.threshold);
      },
      py::arg("target_scores"), py::arg("nontarget_scores"),
      "Raw equal error rate and crossing threshold of two score sets.");

  m.def(
      "flip_rule",
      [](double raw_eer) {
        const ReportedEer r = flip_rule(raw_eer);
        return py::make_tuple(r.reported, r.flipped);
      },
      py::arg("raw_eer"),
      "Reported EER min(x, 1-x) plus whether the flip applied.");

  m.def("gender_average", &gender_average, py::arg("eer_female"),
        py::arg("eer_male"), "Arithmetic mean of the two gender EERs.");

  m.def(
      "edit_distance",
      [](const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
        const EditCounts c = edit_distance(ref, hyp);
        return py::make_tuple(c.substitutions, c.deletions, c.insertions);
      },
      py::arg("ref"), py::arg("hyp"),
      "Minimal (substitutions, deletions, insertions) turning ref into hyp.");

  m.def(
      "wer",
      [](const std::map<std::string, std::string> &refs,
         const std::map<std::string, std::string> &hyps, bool normalize) {
        const TranscriptSet r = make_set(refs, TranscriptSource::gold);
        const TranscriptSet h = make_set(hyps, TranscriptSource::asr);
        const ErrorRateResult result =
            normalize ? compute_wer(r, h)
                      : compute_wer(r, h,
                                    [](const std::string &s) { return s; });
        return rate_dict(result, "wer");
      },
      py::arg("refs"), py::arg("hyps"), py::arg("normalize") = true,
      "Corpus-pooled word error rate over {utt: text} dicts.");

  m.def(
      "per",
      [](const std::map<std::string, std::string> &refs,
         const std::map<std::string, std::string> &hyps) {
        TranscriptSet r = make_set(refs, TranscriptSource::gold);
        TranscriptSet h = make_set(hyps, TranscriptSource::asr);
        for (auto &[utt, entry] : r.entries) entry.phones = entry.text;
        for (auto &[utt, entry] : h.entries) entry.phones = entry.text;
        return rate_dict(compute_per(r, h), "per");
      },
      py::arg("refs"), py::arg("hyps"),
      "Corpus-pooled phone error rate over {utt: phone-string} dicts.");

  m.def(
      "normalize_text", [](const std::string &s) { return normalize_text(s); },
      py::arg("text"),
      "NFKC, lowercase, strip punctuation, collapse whitespace.");

  m.def(
      "normalize_prosody",
      [](const std::vector<std::string> &phones, const std::vector<double> &pitch,
         const std::vector<double> &energy, const std::vector<double> &duration) {
        ProsodySequence seq;
        seq.phone_labels = phones;
        seq.pitch = pitch;
        seq.energy = energy;
        seq.duration = duration;
        const NormalizedProsody norm = normalize(seq);
        py::dict d;
        d["pitch"] = norm.seq.pitch;
        d["energy"] = norm.seq.energy;
        d["duration"] = norm.seq.duration;
        py::dict stats;
        stats["pitch_mean"] = norm.stats.pitch_mean;
        stats["energy_mean"] = norm.stats.energy_mean;
        stats["duration_mean"] = norm.stats.duration_mean;
        d["stats"] = stats;
        return d;
      },
      py::arg("phones"), py::arg("pitch"), py::arg("energy"),
      py::arg("duration"),
      "Divide each prosody channel by its sequence mean (zero pitch stays 0).");

  m.def(
      "select_anonymous",
      [](const std::vector<double> &original,
         const std::map<std::string, std::vector<double>> &pool, double d_min,
         int max_attempts, uint64_t seed, const std::string &key,
         const std::string &level) {
        ArtificialPool p;
        for (const auto &[id, values] : pool)
          p.table.insert(id, EmbeddingVector(values));
        // Identical substream keying as assign_targets, so python draws
        // replay the C++ pipeline exactly.
        SubstreamRng rng(seed,
                         {"anonymize", parse_anonymization_level(level) ==
                                               AnonymizationLevel::speaker
                                           ? "speaker"
                                           : "utterance",
                          key});
        const TargetChoice c =
            select_anonymous(EmbeddingVector(original), p, d_min, max_attempts, rng);
        return py::make_tuple(c.artificial_id, c.distance, c.fallback);
      },
      py::arg("original"), py::arg("pool"), py::arg("d_min") = 0.3,
      py::arg("max_attempts") = 100, py::arg("seed") = 0, py::arg("key") = "",
      py::arg("level") = "utterance",
      "Draw an artificial target at cosine distance >= d_min (with fallback).");
}
