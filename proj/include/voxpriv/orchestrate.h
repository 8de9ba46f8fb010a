// include/voxpriv/orchestrate.h

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
#include <optional>
#include <string>
#include <vector>

#include "voxpriv/anonymize.h"
#include "voxpriv/manifest.h"
#include "voxpriv/report.h"
#include "voxpriv/types.h"

#include "json.hpp"

namespace voxpriv {

enum class TranscriptSourceKind { gold, asr };
enum class EmbeddingSourceKind { original, anonymized };

// The five ablation conditions: full anonymization, resynthesis without
// anonymization, resynthesis from gold transcripts, anonymization from
// gold transcripts, and the untouched original data.
struct Condition {
  std::string name;
  TranscriptSourceKind transcript_source = TranscriptSourceKind::gold;
  EmbeddingSourceKind embedding_source = EmbeddingSourceKind::original;
  bool synthesis = false;

  bool operator==(const Condition &) const = default;
};

// Fixed wiring table:
//   original   = (gold, original,  no synthesis)
//   anon       = (asr,  anonymized, synthesis)
//   resys      = (asr,  original,   synthesis)
//   gold_resys = (gold, original,   synthesis)
//   gold_anon  = (gold, anonymized, synthesis)
Condition plan_condition(const std::string &name);
const std::vector<std::string> &condition_names();

enum class AdapterRole { asr, speaker_encoder, synthesis, phonemizer };

AdapterRole parse_adapter_role(std::string_view s);
std::string_view to_string(AdapterRole role);

// External neural component behind a file-drop contract: a shell command
// template whose placeholders ({audio_dir}, {transcripts}, {embeddings},
// {prosody}, {language}, {output}) are substituted per stage. The command
// must produce the declared output file/directory or exit nonzero.
struct AdapterSpec {
  AdapterRole role = AdapterRole::asr;
  std::string command;
  double timeout_s = 0.0;  // <= 0: no timeout
};

// Everything one `ablate` invocation needs, parsed from the run config
// JSON (see README for the schema).
struct RunConfig {
  Dataset dataset = Dataset::cv;
  LanguageTag language;
  std::filesystem::path workdir;
  std::filesystem::path audio_dir;  // opaque; only adapters look inside

  std::filesystem::path manifest_path;
  ManifestFormat manifest_format = ManifestFormat::cv_tsv;
  std::optional<std::filesystem::path> gold_transcripts;  // else derived from manifest
  std::optional<std::filesystem::path> original_embeddings;
  std::optional<std::filesystem::path> pool;
  std::optional<std::filesystem::path> prosody;
  std::filesystem::path trials_path;
  std::filesystem::path enroll_path;

  AnonymizationPolicy anonymization;
  std::map<AdapterRole, AdapterSpec> adapters;

  // Attacker ASV systems: either a precomputed embedding table per
  // condition ("{condition}" expands in the path) or the pipeline's
  // re-extracted table. Same structure for evaluation recognizers.
  struct AttackerSpec {
    std::optional<std::string> embeddings_template;
    bool use_pipeline = false;
  };
  struct RecognizerSpec {
    std::optional<std::string> transcripts_template;
    bool use_pipeline = false;
  };
  std::map<std::string, AttackerSpec> attackers;
  std::map<std::string, RecognizerSpec> recognizers;
  std::optional<std::string> per_source;  // recognizer feeding the PER column

  // Precomputed stage outputs per condition name; matching stages are
  // skipped without invoking their adapter.
  struct Precomputed {
    std::optional<std::filesystem::path> asr_transcripts;
    std::optional<std::filesystem::path> anonymized_embeddings;
    std::optional<std::filesystem::path> synthesized_audio;
    std::optional<std::filesystem::path> eval_embeddings;
    std::optional<std::filesystem::path> eval_transcripts;
  };
  std::map<std::string, Precomputed> precomputed;

  static RunConfig from_json(const nlohmann::json &j,
                             const std::filesystem::path &base_dir);
  static RunConfig load(const std::filesystem::path &config_path);
};

// One executed (or skipped) pipeline stage with the content hashes that
// make reruns idempotent.
struct StageRecord {
  std::string name;
  std::string command;  // empty for internal stages
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string params;  // serialized stage parameters (e.g. policy)
};

struct RunArtifacts {
  std::string condition;
  std::filesystem::path dir;
  std::vector<StageRecord> stages;
  // Evaluation-ready file locations.
  std::filesystem::path gold_transcripts;
  std::optional<std::filesystem::path> pipeline_eval_embeddings;
  std::optional<std::filesystem::path> pipeline_eval_transcripts;

  nlohmann::json manifest_json() const;
};

// Plans and runs one condition: verifies the required adapters up front
// (before touching anything), then executes stages in dependency order --
// input transcription, anonymization, synthesis, re-extraction, evaluation
// transcription -- skipping stages whose outputs are precomputed or whose
// recorded input hashes are unchanged from a previous run. Writes
// manifest.json with content hashes into the condition directory; reruns
// are byte-identical.
RunArtifacts run_condition(const Condition &condition, const RunConfig &config);

// Scores every configured attacker and recognizer for the finished
// condition and assembles the report row (written as report.json next to
// the artifact manifest by `ablate`).
EvaluationRow evaluate_run(const RunArtifacts &artifacts, const RunConfig &config);

}  // namespace voxpriv
