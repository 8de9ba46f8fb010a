// src/anonymize.cc

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

#include "voxpriv/anonymize.h"

#include <algorithm>

#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

void ArtificialPool::validate(std::size_t expected_dim) const {
  if (table.empty()) throw VoxprivError("artificial pool is empty");
  table.validate();
  if (table.dim() != expected_dim)
    throw VoxprivError("artificial pool dim " + std::to_string(table.dim()) +
                       " does not match embedding dim " +
                       std::to_string(expected_dim));
}

AnonymizationLevel parse_anonymization_level(std::string_view s) {
  if (s == "speaker") return AnonymizationLevel::speaker;
  if (s == "utterance") return AnonymizationLevel::utterance;
  throw VoxprivError("unknown anonymization level '" + std::string(s) +
                     "' (expected speaker or utterance)");
}

std::string_view to_string(AnonymizationLevel l) {
  return l == AnonymizationLevel::speaker ? "speaker" : "utterance";
}

void AnonymizationPolicy::validate() const {
  if (!(d_min >= 0.0 && d_min <= 2.0))
    throw VoxprivError("anonymization policy: d_min must be in [0, 2]");
  if (max_attempts < 1)
    throw VoxprivError("anonymization policy: max_attempts must be >= 1");
}

TargetChoice select_anonymous(const EmbeddingVector &original,
                              const ArtificialPool &pool, double d_min,
                              int max_attempts, SubstreamRng &rng) {
  pool.validate(original.dim());
  if (!(d_min >= 0.0 && d_min <= 2.0))
    throw VoxprivError("select_anonymous: d_min must be in [0, 2]");
  if (max_attempts < 1)
    throw VoxprivError("select_anonymous: max_attempts must be >= 1");

  // Index the sorted keys once so draws are positional and deterministic.
  std::vector<const std::pair<const std::string, EmbeddingVector> *> keys;
  keys.reserve(pool.table.size());
  for (const auto &entry : pool.table.entries) keys.push_back(&entry);

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const auto *candidate = keys[rng.bounded(keys.size())];
    const double dist = cosine_distance(original, candidate->second);
    if (dist >= d_min) return {candidate->first, dist, false};
  }

  // No candidate reached d_min: fall back to the farthest pool element.
  // Iteration over sorted keys makes the tie-break the first key in order.
  TargetChoice best;
  best.fallback = true;
  best.distance = -1.0;
  for (const auto *entry : keys) {
    const double dist = cosine_distance(original, entry->second);
    if (dist > best.distance) {
      best.distance = dist;
      best.artificial_id = entry->first;
    }
  }
  return best;
}

AssignmentMap assign_targets(const EmbeddingTable &embeddings,
                             const std::map<std::string, std::string> &utt_to_speaker,
                             const AnonymizationPolicy &policy,
                             const ArtificialPool &pool) {
  policy.validate();
  if (embeddings.empty()) throw VoxprivError("assign_targets: no embeddings");
  embeddings.validate();
  pool.validate(embeddings.dim());

  AssignmentMap out;
  out.policy = policy;

  if (policy.level == AnonymizationLevel::utterance) {
    for (const auto &[utt, vec] : embeddings.entries) {
      SubstreamRng rng(policy.seed, {"anonymize", "utterance", utt});
      out.entries.emplace(utt, select_anonymous(vec, pool, policy.d_min,
                                                policy.max_attempts, rng));
      out.key_of_utt.emplace(utt, utt);
    }
    return out;
  }

  // Speaker level: one draw per speaker against the renormalized mean of its
  // utterance embeddings, reused for every utterance in the session.
  std::map<std::string, std::vector<const EmbeddingVector *>> by_speaker;
  for (const auto &[utt, vec] : embeddings.entries) {
    const auto spk_it = utt_to_speaker.find(utt);
    if (spk_it == utt_to_speaker.end())
      throw VoxprivError("assign_targets: no speaker mapping for utterance '" +
                         utt + "'");
    by_speaker[spk_it->second].push_back(&vec);
    out.key_of_utt.emplace(utt, spk_it->second);
  }
  for (const auto &[speaker, vecs] : by_speaker) {
    const EmbeddingVector original = mean_embedding(vecs);
    SubstreamRng rng(policy.seed, {"anonymize", "speaker", speaker});
    out.entries.emplace(speaker, select_anonymous(original, pool, policy.d_min,
                                                  policy.max_attempts, rng));
  }
  return out;
}

EmbeddingTable apply_assignment(const EmbeddingTable &embeddings,
                                const AssignmentMap &assignment,
                                const ArtificialPool &pool) {
  EmbeddingTable out;
  for (const auto &[utt, vec] : embeddings.entries) {
    const auto key_it = assignment.key_of_utt.find(utt);
    if (key_it == assignment.key_of_utt.end())
      throw VoxprivError("apply_assignment: utterance '" + utt +
                         "' not covered by the assignment map");
    const auto choice_it = assignment.entries.find(key_it->second);
    if (choice_it == assignment.entries.end())
      throw VoxprivError("apply_assignment: key '" + key_it->second +
                         "' has no target choice");
    const auto pool_it = pool.table.entries.find(choice_it->second.artificial_id);
    if (pool_it == pool.table.entries.end())
      throw VoxprivError("apply_assignment: artificial id '" +
                         choice_it->second.artificial_id + "' not in pool");
    out.insert(utt, pool_it->second);
  }
  return out;
}

void write_assignment_map(const AssignmentMap &assignment, const fs::path &path) {
  std::string out;
  out += "# level=" + std::string(to_string(assignment.policy.level)) +
         " d_min=" + format_score(assignment.policy.d_min) +
         " max_attempts=" + std::to_string(assignment.policy.max_attempts) +
         " seed=" + std::to_string(assignment.policy.seed) + "\n";
  for (const auto &[key, choice] : assignment.entries) {
    out += key;
    out += '\t';
    out += choice.artificial_id;
    out += '\t';
    out += format_score(choice.distance);
    out += '\t';
    out += choice.fallback ? '1' : '0';
    out += '\n';
  }
  for (const auto &[utt, key] : assignment.key_of_utt) {
    out += "@utt\t";
    out += utt;
    out += '\t';
    out += key;
    out += '\n';
  }
  write_file_atomic(path, out);
}

AssignmentMap read_assignment_map(const fs::path &path) {
  const std::string contents = read_file(path);
  AssignmentMap map;
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (line[0] == '#') {
      // Policy echo header; parse the level so the map round-trips.
      for (const auto &field : split_whitespace(line.substr(1))) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (name == "level")
          map.policy.level = parse_anonymization_level(value);
        else if (name == "d_min")
          map.policy.d_min = parse_double(value, where + ": d_min");
        else if (name == "max_attempts")
          map.policy.max_attempts =
              static_cast<int>(parse_int(value, where + ": max_attempts"));
        else if (name == "seed")
          map.policy.seed =
              static_cast<uint64_t>(parse_int(value, where + ": seed"));
      }
      continue;
    }
    const auto fields = split_fields(line, '\t');
    if (!fields.empty() && fields[0] == "@utt") {
      if (fields.size() != 3)
        throw VoxprivError(where + ": expected '@utt\\t<utt>\\t<key>'");
      if (!map.key_of_utt.emplace(fields[1], fields[2]).second)
        throw VoxprivError(where + ": duplicate utterance '" + fields[1] + "'");
      continue;
    }
    if (fields.size() != 4)
      throw VoxprivError(where +
                         ": expected 'key\\tartificial-id\\tdistance\\tfallback'");
    TargetChoice choice;
    choice.artificial_id = fields[1];
    choice.distance = parse_double(fields[2], where + ": distance");
    const std::string &flag = fields[3];
    if (flag == "0") choice.fallback = false;
    else if (flag == "1") choice.fallback = true;
    else throw VoxprivError(where + ": fallback flag must be 0 or 1");
    if (!map.entries.emplace(fields[0], choice).second)
      throw VoxprivError(where + ": duplicate key '" + fields[0] + "'");
  }
  for (const auto &[utt, key] : map.key_of_utt) {
    if (!map.entries.count(key))
      throw VoxprivError(path.string() + ": utterance '" + utt +
                         "' references unknown key '" + key + "'");
  }
  return map;
}

}  // namespace voxpriv
