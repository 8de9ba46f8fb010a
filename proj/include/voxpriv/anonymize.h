// include/voxpriv/anonymize.h

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

#include "voxpriv/embedding.h"
#include "voxpriv/rng.h"
#include "voxpriv/types.h"

namespace voxpriv {

// Pool of artificial speaker embeddings (externally generated, e.g. by a
// GAN) from which anonymization targets are drawn.
struct ArtificialPool {
  EmbeddingTable table;
  std::string provenance;

  void validate(std::size_t expected_dim) const;
};

enum class AnonymizationLevel { speaker, utterance };

AnonymizationLevel parse_anonymization_level(std::string_view s);
std::string_view to_string(AnonymizationLevel l);

struct AnonymizationPolicy {
  AnonymizationLevel level = AnonymizationLevel::speaker;
  double d_min = 0.3;       // cosine distance floor, in [0, 2]
  int max_attempts = 100;
  uint64_t seed = 0;

  void validate() const;
};

struct TargetChoice {
  std::string artificial_id;
  double distance = 0.0;
  // Set when no pool candidate reached d_min within max_attempts; the
  // choice is then the pool element with maximum distance.
  bool fallback = false;

  bool operator==(const TargetChoice &) const = default;
};

// One anonymization outcome per selection key (speaker id at speaker
// level, utterance id at utterance level), plus the utterance -> key index
// needed to apply it to an utterance-keyed table.
struct AssignmentMap {
  AnonymizationPolicy policy;
  std::map<std::string, TargetChoice> entries;
  std::map<std::string, std::string> key_of_utt;

  bool operator==(const AssignmentMap &other) const {
    return entries == other.entries && key_of_utt == other.key_of_utt;
  }
};

// Draws pool candidates uniformly with replacement from `rng` and returns
// the first at cosine distance >= d_min from `original`; after
// max_attempts failures, falls back to the maximum-distance pool element
// (first key in sorted order on ties) with the fallback flag set.
TargetChoice select_anonymous(const EmbeddingVector &original,
                              const ArtificialPool &pool, double d_min,
                              int max_attempts, SubstreamRng &rng);

// Speaker level: one selection per speaker, drawn against the speaker's
// renormalized mean utterance embedding and applied to all its utterances
// (one manifest = one session). Utterance level: an independent selection
// per utterance. Selection substreams are keyed
//   (seed, "anonymize", "speaker"|"utterance", <id>)
// so draws are independent and replayable per key.
AssignmentMap assign_targets(const EmbeddingTable &embeddings,
                             const std::map<std::string, std::string> &utt_to_speaker,
                             const AnonymizationPolicy &policy,
                             const ArtificialPool &pool);

// New utterance-keyed table where every utterance maps to its assigned
// artificial vector; the input table is untouched.
EmbeddingTable apply_assignment(const EmbeddingTable &embeddings,
                                const AssignmentMap &assignment,
                                const ArtificialPool &pool);

// Assignment map TSV: "key \t artificial-id \t distance \t fallback" with
// fallback as 0/1, keys sorted.
void write_assignment_map(const AssignmentMap &assignment,
                          const std::filesystem::path &path);
AssignmentMap read_assignment_map(const std::filesystem::path &path);

}  // namespace voxpriv
