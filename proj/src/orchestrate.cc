// src/orchestrate.cc

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

#include "voxpriv/orchestrate.h"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

#include "voxpriv/io.h"
#include "voxpriv/metrics.h"
#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

Condition plan_condition(const std::string &name) {
  if (name == "original")
    return {name, TranscriptSourceKind::gold, EmbeddingSourceKind::original, false};
  if (name == "anon")
    return {name, TranscriptSourceKind::asr, EmbeddingSourceKind::anonymized, true};
  if (name == "resys")
    return {name, TranscriptSourceKind::asr, EmbeddingSourceKind::original, true};
  if (name == "gold_resys")
    return {name, TranscriptSourceKind::gold, EmbeddingSourceKind::original, true};
  if (name == "gold_anon")
    return {name, TranscriptSourceKind::gold, EmbeddingSourceKind::anonymized, true};
  throw VoxprivError("unknown condition '" + name +
                     "' (expected original, anon, resys, gold_resys or gold_anon)");
}

const std::vector<std::string> &condition_names() {
  static const std::vector<std::string> kNames = {"original", "anon", "resys",
                                                  "gold_resys", "gold_anon"};
  return kNames;
}

AdapterRole parse_adapter_role(std::string_view s) {
  if (s == "asr") return AdapterRole::asr;
  if (s == "speaker_encoder") return AdapterRole::speaker_encoder;
  if (s == "synthesis") return AdapterRole::synthesis;
  if (s == "phonemizer") return AdapterRole::phonemizer;
  throw VoxprivError("unknown adapter role '" + std::string(s) + "'");
}

std::string_view to_string(AdapterRole role) {
  switch (role) {
    case AdapterRole::asr: return "asr";
    case AdapterRole::speaker_encoder: return "speaker_encoder";
    case AdapterRole::synthesis: return "synthesis";
    case AdapterRole::phonemizer: return "phonemizer";
  }
  return "?";
}

namespace {

// Substitutes {name} placeholders; unknown names are an error so typos in
// adapter templates surface during planning, not mid-run.
std::string substitute_placeholders(
    const std::string &tmpl, const std::map<std::string, std::string> &values,
    const std::string &what) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    const std::size_t close = tmpl.find('}', open);
    if (close == std::string::npos)
      throw VoxprivError(what + ": unbalanced '{' in template: " + tmpl);
    const std::string name = tmpl.substr(open + 1, close - open - 1);
    const auto it = values.find(name);
    if (it == values.end())
      throw VoxprivError(what + ": unknown placeholder {" + name +
                         "} in template: " + tmpl);
    out += it->second;
    pos = close + 1;
  }
  return out;
}

fs::path resolve_path(const fs::path &base, const fs::path &p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

std::optional<fs::path> optional_path(const nlohmann::json &j, const char *key,
                                      const fs::path &base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return resolve_path(base, fs::path(j.at(key).get<std::string>()));
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json &j, const fs::path &base_dir) {
  RunConfig config;
  config.dataset = parse_dataset(j.at("dataset").get<std::string>());
  config.language = LanguageTag::parse(j.at("language").get<std::string>());
  config.workdir = resolve_path(base_dir, j.at("workdir").get<std::string>());
  if (j.contains("audio_dir"))
    config.audio_dir = resolve_path(base_dir, j.at("audio_dir").get<std::string>());

  if (j.contains("manifest")) {
    const auto &m = j.at("manifest");
    config.manifest_path = resolve_path(base_dir, m.at("path").get<std::string>());
    config.manifest_format =
        parse_manifest_format(m.at("format").get<std::string>());
  }
  config.gold_transcripts = optional_path(j, "gold_transcripts", base_dir);
  config.original_embeddings = optional_path(j, "original_embeddings", base_dir);
  config.pool = optional_path(j, "pool", base_dir);
  config.prosody = optional_path(j, "prosody", base_dir);
  config.trials_path = resolve_path(base_dir, j.at("trials").get<std::string>());
  config.enroll_path =
      resolve_path(base_dir, j.at("enrollments").get<std::string>());

  if (j.contains("anonymization")) {
    const auto &a = j.at("anonymization");
    if (a.contains("level"))
      config.anonymization.level =
          parse_anonymization_level(a.at("level").get<std::string>());
    if (a.contains("d_min"))
      config.anonymization.d_min = a.at("d_min").get<double>();
    if (a.contains("max_attempts"))
      config.anonymization.max_attempts = a.at("max_attempts").get<int>();
    if (a.contains("seed"))
      config.anonymization.seed = a.at("seed").get<uint64_t>();
    config.anonymization.validate();
  }

  if (j.contains("adapters")) {
    for (const auto &[role_name, spec_j] : j.at("adapters").items()) {
      AdapterSpec spec;
      spec.role = parse_adapter_role(role_name);
      spec.command = spec_j.at("command").get<std::string>();
      spec.timeout_s = spec_j.value("timeout_s", 0.0);
      config.adapters.emplace(spec.role, std::move(spec));
    }
  }

  if (j.contains("attackers")) {
    for (const auto &[name, spec_j] : j.at("attackers").items()) {
      AttackerSpec spec;
      if (spec_j.contains("embeddings")) {
        std::string tmpl = spec_j.at("embeddings").get<std::string>();
        if (!fs::path(tmpl).is_absolute()) tmpl = (base_dir / tmpl).string();
        spec.embeddings_template = tmpl;
      }
      spec.use_pipeline = spec_j.value("use_pipeline", false);
      if (!spec.embeddings_template && !spec.use_pipeline)
        throw VoxprivError("attacker '" + name +
                           "': needs \"embeddings\" or \"use_pipeline\": true");
      config.attackers.emplace(name, std::move(spec));
    }
  }
  if (j.contains("recognizers")) {
    for (const auto &[name, spec_j] : j.at("recognizers").items()) {
      RecognizerSpec spec;
      if (spec_j.contains("transcripts")) {
        std::string tmpl = spec_j.at("transcripts").get<std::string>();
        if (!fs::path(tmpl).is_absolute()) tmpl = (base_dir / tmpl).string();
        spec.transcripts_template = tmpl;
      }
      spec.use_pipeline = spec_j.value("use_pipeline", false);
      if (!spec.transcripts_template && !spec.use_pipeline)
        throw VoxprivError("recognizer '" + name +
                           "': needs \"transcripts\" or \"use_pipeline\": true");
      config.recognizers.emplace(name, std::move(spec));
    }
  }
  if (j.contains("per_source")) {
    config.per_source = j.at("per_source").get<std::string>();
    if (!config.recognizers.count(*config.per_source))
      throw VoxprivError("per_source '" + *config.per_source +
                         "' is not a configured recognizer");
  }

  if (j.contains("precomputed")) {
    for (const auto &[cond, pre_j] : j.at("precomputed").items()) {
      plan_condition(cond);  // validates the name
      Precomputed pre;
      pre.asr_transcripts = optional_path(pre_j, "asr_transcripts", base_dir);
      pre.anonymized_embeddings =
          optional_path(pre_j, "anonymized_embeddings", base_dir);
      pre.synthesized_audio = optional_path(pre_j, "synthesized_audio", base_dir);
      pre.eval_embeddings = optional_path(pre_j, "eval_embeddings", base_dir);
      pre.eval_transcripts = optional_path(pre_j, "eval_transcripts", base_dir);
      config.precomputed.emplace(cond, std::move(pre));
    }
  }
  return config;
}

RunConfig RunConfig::load(const fs::path &config_path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(config_path));
  } catch (const nlohmann::json::exception &e) {
    throw VoxprivError(config_path.string() + ": " + e.what());
  }
  try {
    return from_json(j, config_path.parent_path());
  } catch (const nlohmann::json::exception &e) {
    throw VoxprivError(config_path.string() + ": " + e.what());
  }
}

namespace {

// One planned pipeline stage. Exactly one of `command` (adapter stage),
// `internal` (library stage) or `precomputed` is active.
struct PlannedStage {
  std::string name;
  std::string command;  // resolved template, empty for internal/precomputed
  double timeout_s = 0.0;
  std::map<std::string, fs::path> inputs;  // label -> path
  std::vector<fs::path> outputs;
  std::string params;
  std::function<void()> internal;
  bool precomputed = false;
  std::function<void(const fs::path &)> validate_output;
};

std::map<std::string, std::string> hash_paths(
    const std::map<std::string, fs::path> &paths) {
  std::map<std::string, std::string> hashes;
  for (const auto &[label, path] : paths) {
    if (!fs::exists(path))
      throw VoxprivError("missing input: " + path.string());
    hashes.emplace(path.string(), sha256_path(path));
  }
  return hashes;
}

void validate_transcripts_file(const fs::path &path) {
  read_transcripts(path, TranscriptSource::asr);
}

void validate_embeddings_file(const fs::path &path) { read_embeddings(path); }

void validate_audio_dir(const fs::path &path) {
  if (!fs::is_directory(path))
    throw VoxprivError(path.string() + ": synthesized audio directory missing");
  if (fs::directory_iterator(path) == fs::directory_iterator())
    throw VoxprivError(path.string() + ": synthesized audio directory is empty");
}

// Previous run's manifest, used as the step cache: a stage whose command,
// params and input hashes are unchanged and whose outputs still match is
// not executed again.
std::map<std::string, nlohmann::json> load_previous_stages(const fs::path &path) {
  std::map<std::string, nlohmann::json> stages;
  if (!fs::exists(path)) return stages;
  try {
    const nlohmann::json j = nlohmann::json::parse(read_file(path));
    for (const auto &stage : j.at("stages"))
      stages.emplace(stage.at("name").get<std::string>(), stage);
  } catch (const nlohmann::json::exception &) {
    // A corrupt manifest just disables caching.
    stages.clear();
  }
  return stages;
}

bool stage_cached(const nlohmann::json &prev, const PlannedStage &stage,
                  const std::map<std::string, std::string> &input_hashes) {
  try {
    if (prev.at("command").get<std::string>() != stage.command) return false;
    if (prev.at("params").get<std::string>() != stage.params) return false;
    const auto prev_inputs =
        prev.at("inputs").get<std::map<std::string, std::string>>();
    if (prev_inputs != input_hashes) return false;
    const auto prev_outputs =
        prev.at("outputs").get<std::map<std::string, std::string>>();
    if (prev_outputs.size() != stage.outputs.size()) return false;
    for (const auto &out : stage.outputs) {
      const auto it = prev_outputs.find(out.string());
      if (it == prev_outputs.end()) return false;
      if (!fs::exists(out) || sha256_path(out) != it->second) return false;
    }
  } catch (const nlohmann::json::exception &) {
    return false;
  }
  return true;
}

const AdapterSpec &require_adapter(const RunConfig &config, AdapterRole role,
                                   const std::string &stage) {
  const auto it = config.adapters.find(role);
  if (it == config.adapters.end())
    throw VoxprivError("stage '" + stage + "' needs the '" +
                       std::string(to_string(role)) +
                       "' adapter, which is not configured");
  return it->second;
}

}  // namespace

RunArtifacts run_condition(const Condition &condition, const RunConfig &config) {
  if (plan_condition(condition.name) != condition)
    throw VoxprivError("condition '" + condition.name +
                       "' does not match the fixed wiring table");
  if (config.workdir.empty())
    throw VoxprivError("run config: workdir is required");

  const fs::path cond_dir = config.workdir / condition.name;
  const fs::path logs_dir = cond_dir / "logs";

  RunArtifacts artifacts;
  artifacts.condition = condition.name;
  artifacts.dir = cond_dir;

  // --- Resolve shared inputs -------------------------------------------
  fs::path gold_path;
  std::optional<Manifest> manifest;
  auto need_manifest = [&]() -> const Manifest & {
    if (!manifest) {
      if (config.manifest_path.empty())
        throw VoxprivError("run config: a manifest is required (for gold "
                           "transcripts or speaker mapping) but none is set");
      manifest = parse_manifest(config.manifest_path, config.manifest_format,
                                config.dataset, config.language)
                     .manifest;
    }
    return *manifest;
  };

  if (config.gold_transcripts) {
    gold_path = *config.gold_transcripts;
    if (!fs::exists(gold_path))
      throw VoxprivError("gold transcripts not found: " + gold_path.string());
  } else {
    // Derive the gold side from the manifest text fields; the file is
    // shared by all conditions and rewritten byte-identically.
    const Manifest &m = need_manifest();
    TranscriptSet gold;
    gold.source = TranscriptSource::gold;
    for (const auto &rec : m.records) {
      TranscriptEntry entry;
      entry.language = rec.language;
      entry.text = rec.text;
      entry.phones = rec.phones;
      gold.entries.emplace(rec.utt, std::move(entry));
    }
    gold_path = config.workdir / "gold_transcripts.tsv";
    fs::create_directories(config.workdir);
    write_transcripts(gold, gold_path);
  }
  artifacts.gold_transcripts = gold_path;

  const RunConfig::Precomputed *pre = nullptr;
  if (const auto it = config.precomputed.find(condition.name);
      it != config.precomputed.end())
    pre = &it->second;

  const bool need_eval_embeddings = std::any_of(
      config.attackers.begin(), config.attackers.end(),
      [](const auto &kv) { return kv.second.use_pipeline; });
  const bool need_eval_transcripts = std::any_of(
      config.recognizers.begin(), config.recognizers.end(),
      [](const auto &kv) { return kv.second.use_pipeline; });

  // --- Plan all stages up front (no execution yet) ---------------------
  std::vector<PlannedStage> stages;
  const std::string lang = config.language.str();

  const fs::path asr_out = cond_dir / "asr_transcripts.tsv";
  const fs::path anon_out = cond_dir / "anon_embeddings.vpeb";
  const fs::path anon_map_out = cond_dir / "assignment_map.tsv";
  const fs::path synth_out = cond_dir / "synth_audio";
  const fs::path eval_emb_out = cond_dir / "eval_embeddings.vpeb";
  const fs::path eval_asr_out = cond_dir / "eval_transcripts.tsv";

  auto make_precomputed_stage = [](const std::string &name, const fs::path &path,
                                   std::function<void(const fs::path &)> check) {
    if (!fs::exists(path))
      throw VoxprivError("precomputed " + name + " not found: " + path.string());
    if (check) check(path);
    PlannedStage stage;
    stage.name = name;
    stage.precomputed = true;
    stage.params = "precomputed";
    stage.outputs = {path};
    return stage;
  };

  // Stage 1: transcription of the input audio (asr-sourced conditions).
  fs::path synth_transcripts = gold_path;
  if (condition.synthesis && condition.transcript_source == TranscriptSourceKind::asr) {
    if (pre && pre->asr_transcripts) {
      stages.push_back(make_precomputed_stage("asr", *pre->asr_transcripts,
                                              validate_transcripts_file));
      synth_transcripts = *pre->asr_transcripts;
    } else {
      const AdapterSpec &adapter = require_adapter(config, AdapterRole::asr, "asr");
      if (config.audio_dir.empty())
        throw VoxprivError("stage 'asr' needs audio_dir in the run config");
      PlannedStage stage;
      stage.name = "asr";
      stage.timeout_s = adapter.timeout_s;
      stage.inputs = {{"audio_dir", config.audio_dir}};
      stage.outputs = {asr_out};
      stage.command = substitute_placeholders(
          adapter.command,
          {{"audio_dir", config.audio_dir.string()},
           {"language", lang},
           {"output", asr_out.string()}},
          "asr adapter");
      stage.validate_output = validate_transcripts_file;
      stages.push_back(std::move(stage));
      synth_transcripts = asr_out;
    }
  }

  // Stage 2: embedding anonymization (internal, library-level).
  fs::path synth_embeddings;
  if (condition.synthesis) {
    if (condition.embedding_source == EmbeddingSourceKind::anonymized) {
      if (pre && pre->anonymized_embeddings) {
        stages.push_back(make_precomputed_stage("anonymize",
                                                *pre->anonymized_embeddings,
                                                validate_embeddings_file));
        synth_embeddings = *pre->anonymized_embeddings;
      } else {
        if (!config.original_embeddings)
          throw VoxprivError("stage 'anonymize' needs original_embeddings in "
                             "the run config");
        if (!config.pool)
          throw VoxprivError("stage 'anonymize' needs pool in the run config");
        PlannedStage stage;
        stage.name = "anonymize";
        stage.inputs = {{"original_embeddings", *config.original_embeddings},
                        {"pool", *config.pool}};
        const bool speaker_level =
            config.anonymization.level == AnonymizationLevel::speaker;
        if (speaker_level) {
          need_manifest();
          stage.inputs.emplace("manifest", config.manifest_path);
        }
        stage.outputs = {anon_out, anon_map_out};
        nlohmann::json params = {
            {"level", std::string(to_string(config.anonymization.level))},
            {"d_min", config.anonymization.d_min},
            {"max_attempts", config.anonymization.max_attempts},
            {"seed", config.anonymization.seed}};
        stage.params = params.dump();
        const AnonymizationPolicy policy = config.anonymization;
        const fs::path emb_path = *config.original_embeddings;
        const fs::path pool_path = *config.pool;
        stage.internal = [&, policy, emb_path, pool_path]() {
          const EmbeddingTable originals = read_embeddings(emb_path);
          ArtificialPool pool;
          pool.table = read_embeddings(pool_path);
          std::map<std::string, std::string> utt2spk;
          if (policy.level == AnonymizationLevel::speaker)
            utt2spk = need_manifest().utt_to_speaker();
          const AssignmentMap assignment =
              assign_targets(originals, utt2spk, policy, pool);
          write_embeddings(apply_assignment(originals, assignment, pool), anon_out);
          write_assignment_map(assignment, anon_map_out);
        };
        stages.push_back(std::move(stage));
        synth_embeddings = anon_out;
      }
    } else {
      if (!config.original_embeddings)
        throw VoxprivError("condition '" + condition.name +
                           "' needs original_embeddings in the run config");
      synth_embeddings = *config.original_embeddings;
    }
  }

  // Stage 3: synthesis.
  fs::path eval_audio = config.audio_dir;
  if (condition.synthesis) {
    if (pre && pre->synthesized_audio) {
      stages.push_back(make_precomputed_stage("synthesize", *pre->synthesized_audio,
                                              validate_audio_dir));
      eval_audio = *pre->synthesized_audio;
    } else {
      const AdapterSpec &adapter =
          require_adapter(config, AdapterRole::synthesis, "synthesize");
      PlannedStage stage;
      stage.name = "synthesize";
      stage.timeout_s = adapter.timeout_s;
      stage.inputs = {{"transcripts", synth_transcripts},
                      {"embeddings", synth_embeddings}};
      if (config.prosody) stage.inputs.emplace("prosody", *config.prosody);
      if (!config.audio_dir.empty())
        stage.inputs.emplace("audio_dir", config.audio_dir);
      stage.outputs = {synth_out};
      stage.command = substitute_placeholders(
          adapter.command,
          {{"audio_dir", config.audio_dir.string()},
           {"transcripts", synth_transcripts.string()},
           {"embeddings", synth_embeddings.string()},
           {"prosody", config.prosody ? config.prosody->string() : ""},
           {"language", lang},
           {"output", synth_out.string()}},
          "synthesis adapter");
      stage.validate_output = validate_audio_dir;
      stages.push_back(std::move(stage));
      eval_audio = synth_out;
    }
  }

  // Stage 4: re-extract speaker embeddings from the evaluation audio.
  if (pre && pre->eval_embeddings) {
    stages.push_back(make_precomputed_stage("extract_eval", *pre->eval_embeddings,
                                            validate_embeddings_file));
    artifacts.pipeline_eval_embeddings = *pre->eval_embeddings;
  } else if (need_eval_embeddings) {
    if (!condition.synthesis && config.original_embeddings) {
      // Original audio: the original embedding table already is the
      // evaluation table; no adapter call.
      artifacts.pipeline_eval_embeddings = *config.original_embeddings;
    } else {
      const AdapterSpec &adapter =
          require_adapter(config, AdapterRole::speaker_encoder, "extract_eval");
      if (eval_audio.empty())
        throw VoxprivError("stage 'extract_eval' needs audio_dir in the run config");
      PlannedStage stage;
      stage.name = "extract_eval";
      stage.timeout_s = adapter.timeout_s;
      stage.inputs = {{"audio_dir", eval_audio}};
      stage.outputs = {eval_emb_out};
      stage.command = substitute_placeholders(
          adapter.command,
          {{"audio_dir", eval_audio.string()},
           {"language", lang},
           {"output", eval_emb_out.string()}},
          "speaker_encoder adapter");
      stage.validate_output = validate_embeddings_file;
      stages.push_back(std::move(stage));
      artifacts.pipeline_eval_embeddings = eval_emb_out;
    }
  }

  // Stage 5: transcribe the evaluation audio for utility metrics.
  if (pre && pre->eval_transcripts) {
    stages.push_back(make_precomputed_stage("asr_eval", *pre->eval_transcripts,
                                            validate_transcripts_file));
    artifacts.pipeline_eval_transcripts = *pre->eval_transcripts;
  } else if (need_eval_transcripts) {
    const AdapterSpec &adapter =
        require_adapter(config, AdapterRole::asr, "asr_eval");
    if (eval_audio.empty())
      throw VoxprivError("stage 'asr_eval' needs audio_dir in the run config");
    PlannedStage stage;
    stage.name = "asr_eval";
    stage.timeout_s = adapter.timeout_s;
    stage.inputs = {{"audio_dir", eval_audio}};
    stage.outputs = {eval_asr_out};
    stage.command = substitute_placeholders(
        adapter.command,
        {{"audio_dir", eval_audio.string()},
         {"language", lang},
         {"output", eval_asr_out.string()}},
        "asr adapter");
    stage.validate_output = validate_transcripts_file;
    stages.push_back(std::move(stage));
    artifacts.pipeline_eval_transcripts = eval_asr_out;
  }

  // --- Execute ----------------------------------------------------------
  fs::create_directories(logs_dir);
  const auto previous = load_previous_stages(cond_dir / "manifest.json");

  for (auto &stage : stages) {
    StageRecord record;
    record.name = stage.name;
    record.command = stage.command;
    record.params = stage.params;

    if (stage.precomputed) {
      for (const auto &out : stage.outputs)
        record.outputs.emplace(out.string(), sha256_path(out));
      artifacts.stages.push_back(std::move(record));
      continue;
    }

    record.inputs = hash_paths(stage.inputs);

    bool cached = false;
    if (const auto it = previous.find(stage.name); it != previous.end())
      cached = stage_cached(it->second, stage, record.inputs);

    if (!cached) {
      // An earlier output of this stage may linger from a stale run.
      for (const auto &out : stage.outputs) fs::remove_all(out);
      if (stage.internal) {
        stage.internal();
      } else {
        const fs::path log = logs_dir / (stage.name + ".log");
        const CommandResult result =
            run_command(stage.command, log, stage.timeout_s);
        if (result.timed_out)
          throw VoxprivError("stage '" + stage.name + "' timed out after " +
                             format_score(stage.timeout_s) + "s (log: " +
                             log.string() + ")");
        if (result.exit_code != 0)
          throw VoxprivError("stage '" + stage.name + "' failed with exit code " +
                             std::to_string(result.exit_code) + " (log: " +
                             log.string() + ")");
      }
      for (const auto &out : stage.outputs) {
        if (!fs::exists(out))
          throw VoxprivError("stage '" + stage.name +
                             "' did not produce its declared output: " +
                             out.string());
      }
      if (stage.validate_output) {
        try {
          stage.validate_output(stage.outputs.front());
        } catch (const VoxprivError &e) {
          throw VoxprivError("stage '" + stage.name +
                             "' produced invalid output: " + e.what());
        }
      }
    }

    for (const auto &out : stage.outputs)
      record.outputs.emplace(out.string(), sha256_path(out));
    artifacts.stages.push_back(std::move(record));
  }

  write_file_atomic(cond_dir / "manifest.json",
                    artifacts.manifest_json().dump(2) + "\n");
  return artifacts;
}

nlohmann::json RunArtifacts::manifest_json() const {
  nlohmann::json stages_j = nlohmann::json::array();
  for (const auto &stage : stages) {
    stages_j.push_back({{"name", stage.name},
                        {"command", stage.command},
                        {"inputs", stage.inputs},
                        {"outputs", stage.outputs},
                        {"params", stage.params}});
  }
  return {{"condition", condition}, {"stages", stages_j}};
}

namespace {

// Reference transcripts restricted to the hypothesis keys; a hypothesis
// for an unknown utterance is an error, not ignored.
TranscriptSet restrict_refs(const TranscriptSet &refs, const TranscriptSet &hyps,
                            const std::string &what) {
  TranscriptSet out;
  out.source = refs.source;
  std::set<std::string> unknown;
  for (const auto &[utt, entry] : hyps.entries) {
    const auto it = refs.entries.find(utt);
    if (it == refs.entries.end())
      unknown.insert(utt);
    else
      out.entries.emplace(utt, it->second);
  }
  if (!unknown.empty()) {
    std::string msg = what + ": hypotheses for unknown utterances:";
    std::size_t shown = 0;
    for (const auto &utt : unknown) {
      if (shown++ == 8) {
        msg += " ...";
        break;
      }
      msg += " " + utt;
    }
    throw VoxprivError(msg);
  }
  return out;
}

bool has_all_phones(const TranscriptSet &set) {
  for (const auto &[utt, entry] : set.entries)
    if (trim(entry.phones).empty()) return false;
  return true;
}

}  // namespace

EvaluationRow evaluate_run(const RunArtifacts &artifacts, const RunConfig &config) {
  EvaluationRow row;
  row.dataset = std::string(to_string(config.dataset));
  row.language = config.language.str();
  row.condition = artifacts.condition;

  if (config.attackers.empty() && config.recognizers.empty())
    throw VoxprivError("evaluate_run: no attackers or recognizers configured");

  // Collect every missing metric input before failing.
  std::vector<std::string> missing;
  auto attacker_path = [&](const std::string &name,
                           const RunConfig::AttackerSpec &spec)
      -> std::optional<fs::path> {
    if (spec.embeddings_template) {
      return fs::path(substitute_placeholders(
          *spec.embeddings_template, {{"condition", artifacts.condition}},
          "attacker '" + name + "'"));
    }
    if (artifacts.pipeline_eval_embeddings)
      return artifacts.pipeline_eval_embeddings;
    missing.push_back("attacker '" + name +
                      "': no pipeline embeddings for condition '" +
                      artifacts.condition + "'");
    return std::nullopt;
  };
  auto recognizer_path = [&](const std::string &name,
                             const RunConfig::RecognizerSpec &spec)
      -> std::optional<fs::path> {
    if (spec.transcripts_template) {
      return fs::path(substitute_placeholders(
          *spec.transcripts_template, {{"condition", artifacts.condition}},
          "recognizer '" + name + "'"));
    }
    if (artifacts.pipeline_eval_transcripts)
      return artifacts.pipeline_eval_transcripts;
    missing.push_back("recognizer '" + name +
                      "': no pipeline transcripts for condition '" +
                      artifacts.condition + "'");
    return std::nullopt;
  };

  std::map<std::string, fs::path> attacker_paths, recognizer_paths;
  for (const auto &[name, spec] : config.attackers) {
    if (auto path = attacker_path(name, spec)) {
      if (!fs::exists(*path))
        missing.push_back("attacker '" + name + "': " + path->string() +
                          " not found");
      else
        attacker_paths.emplace(name, *path);
    }
  }
  for (const auto &[name, spec] : config.recognizers) {
    if (auto path = recognizer_path(name, spec)) {
      if (!fs::exists(*path))
        missing.push_back("recognizer '" + name + "': " + path->string() +
                          " not found");
      else
        recognizer_paths.emplace(name, *path);
    }
  }
  if (!missing.empty()) {
    std::string msg = "evaluate_run: missing metric inputs:";
    for (const auto &m : missing) msg += "\n  - " + m;
    throw VoxprivError(msg);
  }

  // --- Privacy: EER per attacker ---------------------------------------
  const TrialSet trials = read_trial_set(config.trials_path, config.enroll_path);
  for (const auto &[name, path] : attacker_paths) {
    const EmbeddingTable table = read_embeddings(path);
    const std::vector<TrialScore> scores =
        score_trials(trials, table, default_jobs());

    std::vector<double> tgt_f, non_f, tgt_m, non_m;
    for (const auto &s : scores) {
      const Gender g = trials.models.at(s.model).gender;
      auto &bucket = (g == Gender::female)
                         ? (s.label == TrialLabel::target ? tgt_f : non_f)
                         : (s.label == TrialLabel::target ? tgt_m : non_m);
      bucket.push_back(s.value);
    }

    EerCell cell;
    std::optional<double> avg_f, avg_m;
    if (!tgt_f.empty() || !non_f.empty()) {
      const ReportedEer rep = flip_rule(compute_eer(tgt_f, non_f).eer);
      cell.female = rep.reported;
      cell.flipped_female = rep.flipped;
      avg_f = rep.reported;
    }
    if (!tgt_m.empty() || !non_m.empty()) {
      const ReportedEer rep = flip_rule(compute_eer(tgt_m, non_m).eer);
      cell.male = rep.reported;
      cell.flipped_male = rep.flipped;
      avg_m = rep.reported;
    }
    if (avg_f && avg_m) {
      cell.average = gender_average(*avg_f, *avg_m);
    } else if (avg_f || avg_m) {
      cell.average = avg_f ? *avg_f : *avg_m;
      cell.single_gender = true;
    } else {
      throw VoxprivError("evaluate_run: attacker '" + name +
                         "': no scored trials");
    }
    row.eer.emplace(name, cell);
  }

  // --- Utility: WER per recognizer, PER from the chosen source ---------
  if (!recognizer_paths.empty()) {
    const TranscriptSet gold =
        read_transcripts(artifacts.gold_transcripts, TranscriptSource::gold);
    std::map<std::string, std::pair<TranscriptSet, TranscriptSet>> aligned;
    for (const auto &[name, path] : recognizer_paths) {
      TranscriptSet hyps = read_transcripts(path, TranscriptSource::asr);
      TranscriptSet refs = restrict_refs(gold, hyps, "recognizer '" + name + "'");
      const ErrorRateResult wer = compute_wer(refs, hyps, default_jobs());
      WerCell cell;
      cell.wer = wer.rate();
      cell.substitutions = wer.counts.substitutions;
      cell.deletions = wer.counts.deletions;
      cell.insertions = wer.counts.insertions;
      cell.ref_tokens = wer.ref_tokens;
      row.wer.emplace(name, cell);
      aligned.emplace(name, std::make_pair(std::move(refs), std::move(hyps)));
    }

    std::optional<std::string> per_source = config.per_source;
    if (!per_source) {
      for (const auto &[name, pair] : aligned) {
        if (has_all_phones(pair.first) && has_all_phones(pair.second)) {
          per_source = name;
          break;
        }
      }
    }
    if (per_source) {
      const auto &pair = aligned.at(*per_source);
      const ErrorRateResult per = compute_per(pair.first, pair.second,
                                              default_jobs());
      WerCell cell;
      cell.wer = per.rate();
      cell.substitutions = per.counts.substitutions;
      cell.deletions = per.counts.deletions;
      cell.insertions = per.counts.insertions;
      cell.ref_tokens = per.ref_tokens;
      row.per = cell;
      row.per_source = *per_source;
    }
  }
  return row;
}

}  // namespace voxpriv
