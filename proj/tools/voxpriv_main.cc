// tools/voxpriv_main.cc

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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "voxpriv/anonymize.h"
#include "voxpriv/io.h"
#include "voxpriv/manifest.h"
#include "voxpriv/metrics.h"
#include "voxpriv/orchestrate.h"
#include "voxpriv/prosody.h"
#include "voxpriv/report.h"
#include "voxpriv/trialgen.h"
#include "voxpriv/trials.h"
#include "voxpriv/types.h"
#include "voxpriv/util.h"

namespace {

constexpr const char *kVersion = "0.1.0";

using namespace voxpriv;

std::string percent2(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

// ---------------------------------------------------------------------------
// trialgen

struct TrialgenArgs {
  std::string manifest;
  std::string format = "cv_tsv";
  std::string dataset;
  std::string language;
  uint64_t seed = 0;
  std::string out;
  std::string enroll_out;
  std::string summary_out;
  std::optional<int> enroll_speakers;
  std::optional<int> extra_trial_speakers;
  std::optional<int> cap;
  bool no_cap = false;
  std::optional<double> enroll_fraction;
  std::optional<int> enroll_min;
};

void run_trialgen(const TrialgenArgs &args) {
  const Dataset dataset = parse_dataset(args.dataset);
  const LanguageTag language = LanguageTag::parse(args.language);
  const ManifestFormat format = parse_manifest_format(args.format);

  TrialGenConfig config = TrialGenConfig::defaults_for(dataset);
  config.seed = args.seed;
  if (args.enroll_speakers) config.enroll_speakers_per_gender = *args.enroll_speakers;
  if (args.extra_trial_speakers)
    config.extra_trial_speakers_per_gender = *args.extra_trial_speakers;
  if (args.cap) config.utterance_cap = *args.cap;
  if (args.no_cap) config.utterance_cap.reset();
  if (args.enroll_fraction) config.enroll_fraction = *args.enroll_fraction;
  if (args.enroll_min) config.enroll_min = *args.enroll_min;

  const ManifestParseResult parsed =
      parse_manifest(args.manifest, format, dataset, language);
  if (parsed.dropped_missing_gender > 0)
    std::cerr << "note: dropped " << parsed.dropped_missing_gender
              << " rows with missing gender\n";

  TrialGenResult result = generate_trials(parsed.manifest, config);
  const std::string enroll_path =
      args.enroll_out.empty() ? args.out + ".enroll" : args.enroll_out;
  write_trial_set(result.trials, args.out, enroll_path);

  result.summary["dropped_missing_gender"] = parsed.dropped_missing_gender;
  const std::string summary = result.summary.dump(2) + "\n";
  if (args.summary_out.empty())
    std::cout << summary;
  else
    write_file_atomic(args.summary_out, summary);
}

// ---------------------------------------------------------------------------
// anonymize

struct AnonymizeArgs {
  std::string embeddings;
  std::string pool;
  std::string level = "speaker";
  double d_min = 0.3;
  int max_attempts = 100;
  uint64_t seed = 0;
  std::string utt2spk;
  std::string out;
  std::string map_out;
};

void run_anonymize(const AnonymizeArgs &args) {
  AnonymizationPolicy policy;
  policy.level = parse_anonymization_level(args.level);
  policy.d_min = args.d_min;
  policy.max_attempts = args.max_attempts;
  policy.seed = args.seed;
  policy.validate();

  const EmbeddingTable embeddings = read_embeddings(args.embeddings);
  ArtificialPool pool;
  pool.table = read_embeddings(args.pool);

  std::map<std::string, std::string> utt2spk;
  if (policy.level == AnonymizationLevel::speaker) {
    if (args.utt2spk.empty())
      throw VoxprivError("anonymize: --utt2spk is required at speaker level "
                         "(one manifest is one session)");
    utt2spk = read_utt2spk(args.utt2spk);
  }

  const AssignmentMap assignment = assign_targets(embeddings, utt2spk, policy, pool);
  write_embeddings(apply_assignment(embeddings, assignment, pool), args.out);
  if (!args.map_out.empty()) write_assignment_map(assignment, args.map_out);

  std::size_t fallbacks = 0;
  for (const auto &[key, choice] : assignment.entries)
    if (choice.fallback) ++fallbacks;
  if (fallbacks > 0)
    std::cerr << "note: " << fallbacks << " of " << assignment.entries.size()
              << " assignments fell back below d_min\n";
}

// ---------------------------------------------------------------------------
// prosody

void run_prosody_normalize(const std::string &in, const std::string &out,
                           const std::string &stats_out) {
  const auto sequences = read_prosody(in);
  std::map<std::string, ProsodySequence> normalized;
  std::map<std::string, ProsodyStats> stats;
  for (const auto &[utt, seq] : sequences) {
    NormalizedProsody norm = normalize(seq);
    normalized.emplace(utt, std::move(norm.seq));
    stats.emplace(utt, norm.stats);
  }
  write_prosody(normalized, out);
  write_prosody_stats(stats, stats_out.empty() ? out + ".stats" : stats_out);
}

void run_prosody_denormalize(const std::string &in, const std::string &stats_in,
                             const std::string &out) {
  const auto sequences = read_prosody(in);
  const auto stats = read_prosody_stats(stats_in);
  std::map<std::string, ProsodySequence> restored;
  for (const auto &[utt, seq] : sequences) {
    const auto it = stats.find(utt);
    if (it == stats.end())
      throw VoxprivError("prosody denormalize: no stats for utterance '" + utt +
                         "'");
    NormalizedProsody norm;
    norm.seq = seq;
    norm.stats = it->second;
    restored.emplace(utt, denormalize(norm));
  }
  write_prosody(restored, out);
}

// ---------------------------------------------------------------------------
// metrics subcommands

void run_score(const std::string &trials_path, const std::string &enroll_path,
               const std::string &embeddings_path, const std::string &out,
               int jobs) {
  const TrialSet trials = read_trial_set(trials_path, enroll_path);
  const EmbeddingTable embeddings = read_embeddings(embeddings_path);
  write_scores(score_trials(trials, embeddings, jobs), out);
}

void run_eer(const std::string &scores_path, bool raw, bool as_json) {
  const auto scores = read_scores(scores_path);
  auto [targets, nontargets] = split_by_label(scores);
  const EerResult result = compute_eer(targets, nontargets);
  const ReportedEer reported = flip_rule(result.eer);
  if (as_json) {
    const nlohmann::json j = {{"raw_eer", result.eer},
                              {"reported_eer", reported.reported},
                              {"flipped", reported.flipped},
                              {"threshold", result.threshold},
                              {"targets", targets.size()},
                              {"nontargets", nontargets.size()}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << percent2(raw ? result.eer : reported.reported) << "\n";
}

void run_wer(const std::string &ref_path, const std::string &hyp_path,
             bool no_normalize, int jobs, bool as_json) {
  const TranscriptSet refs = read_transcripts(ref_path, TranscriptSource::gold);
  const TranscriptSet hyps = read_transcripts(hyp_path, TranscriptSource::asr);
  const ErrorRateResult result =
      no_normalize
          ? compute_wer(refs, hyps, [](const std::string &s) { return s; }, jobs)
          : compute_wer(refs, hyps, jobs);
  if (as_json) {
    const nlohmann::json j = {{"wer", result.rate()},
                              {"substitutions", result.counts.substitutions},
                              {"deletions", result.counts.deletions},
                              {"insertions", result.counts.insertions},
                              {"ref_tokens", result.ref_tokens}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << percent2(result.rate()) << "\n";
}

void run_per(const std::string &ref_path, const std::string &hyp_path, int jobs,
             bool as_json) {
  const TranscriptSet refs = read_transcripts(ref_path, TranscriptSource::gold);
  const TranscriptSet hyps = read_transcripts(hyp_path, TranscriptSource::asr);
  const ErrorRateResult result = compute_per(refs, hyps, jobs);
  if (as_json) {
    const nlohmann::json j = {{"per", result.rate()},
                              {"substitutions", result.counts.substitutions},
                              {"deletions", result.counts.deletions},
                              {"insertions", result.counts.insertions},
                              {"ref_phones", result.ref_tokens}};
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << percent2(result.rate()) << "\n";
}

// ---------------------------------------------------------------------------
// ablate / report

void run_ablate(const std::string &config_path,
                const std::vector<std::string> &conditions) {
  const RunConfig config = RunConfig::load(config_path);
  if (conditions.empty())
    throw VoxprivError("ablate: --conditions must name at least one condition");
  // Validate every name before running anything.
  std::vector<Condition> planned;
  for (const auto &name : conditions) planned.push_back(plan_condition(name));

  for (const auto &condition : planned) {
    std::cerr << "[" << condition.name << "] running\n";
    const RunArtifacts artifacts = run_condition(condition, config);
    const EvaluationRow row = evaluate_run(artifacts, config);
    write_file_atomic(artifacts.dir / "report.json", row.to_json().dump(2) + "\n");
    std::cerr << "[" << condition.name << "] done: " << artifacts.stages.size()
              << " stages\n";
  }
}

void run_report(const std::vector<std::string> &runs, const std::string &format,
                const std::string &out,
                const std::vector<std::string> &trial_counts) {
  if (!trial_counts.empty()) {
    std::vector<std::filesystem::path> files(trial_counts.begin(),
                                             trial_counts.end());
    const std::string csv = render_trial_counts_csv(count_trials(files));
    if (out.empty())
      std::cout << csv;
    else
      write_file_atomic(out, csv);
    return;
  }
  if (runs.empty())
    throw VoxprivError("report: give --runs or --trial-counts");
  std::vector<std::filesystem::path> paths(runs.begin(), runs.end());
  const ReportTable table = load_reports(paths);
  const std::string rendered =
      format == "markdown" ? table.render_markdown() : table.render_csv();
  if (out.empty())
    std::cout << rendered;
  else
    write_file_atomic(out, rendered);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"speaker anonymization evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("voxpriv ") + kVersion);

  // trialgen ---------------------------------------------------------------
  TrialgenArgs tg;
  auto *trialgen = app.add_subcommand(
      "trialgen", "build enrollment/trial sets from a dataset manifest");
  trialgen->add_option("--manifest", tg.manifest, "manifest file or directory")
      ->required();
  trialgen->add_option("--format", tg.format, "cv_tsv or libri_dir")
      ->check(CLI::IsMember({"cv_tsv", "libri_dir"}));
  trialgen->add_option("--dataset", tg.dataset, "cv or libri")->required();
  trialgen->add_option("--language", tg.language, "language code")->required();
  trialgen->add_option("--seed", tg.seed, "random seed");
  trialgen->add_option("--out", tg.out, "trial pair file to write")->required();
  trialgen->add_option("--enroll-out", tg.enroll_out,
                       "enrollment sidecar (default: <out>.enroll)");
  trialgen->add_option("--summary-out", tg.summary_out,
                       "summary JSON file (default: stdout)");
  trialgen->add_option("--enroll-speakers", tg.enroll_speakers,
                       "enrollment speakers per gender");
  trialgen->add_option("--extra-trial-speakers", tg.extra_trial_speakers,
                       "additional trial-only speakers per gender");
  trialgen->add_option("--cap", tg.cap, "utterance cap per speaker");
  trialgen->add_flag("--no-cap", tg.no_cap, "disable the utterance cap");
  trialgen->add_option("--enroll-fraction", tg.enroll_fraction,
                       "enrollment fraction of each speaker's utterances");
  trialgen->add_option("--enroll-min", tg.enroll_min,
                       "minimum enrollment utterances per speaker");

  // anonymize --------------------------------------------------------------
  AnonymizeArgs an;
  auto *anonymize = app.add_subcommand(
      "anonymize", "replace embeddings with artificial pool targets");
  anonymize->add_option("--embeddings", an.embeddings, "input embedding table")
      ->required();
  anonymize->add_option("--pool", an.pool, "artificial speaker pool")->required();
  anonymize->add_option("--level", an.level, "speaker or utterance")
      ->check(CLI::IsMember({"speaker", "utterance"}));
  anonymize->add_option("--dmin", an.d_min, "minimum cosine distance");
  anonymize->add_option("--max-attempts", an.max_attempts,
                        "sampling attempts before fallback");
  anonymize->add_option("--seed", an.seed, "random seed");
  anonymize->add_option("--utt2spk", an.utt2spk,
                        "utterance-to-speaker map (speaker level)");
  anonymize->add_option("--out", an.out, "anonymized embedding table")->required();
  anonymize->add_option("--map", an.map_out, "assignment map TSV");

  // prosody ----------------------------------------------------------------
  auto *prosody = app.add_subcommand("prosody", "prosody sequence processing");
  prosody->require_subcommand(1);
  std::string pr_in, pr_out, pr_stats;
  auto *pr_norm = prosody->add_subcommand("normalize",
                                          "divide each channel by its mean");
  pr_norm->add_option("--in", pr_in, "prosody TSV")->required();
  pr_norm->add_option("--out", pr_out, "normalized prosody TSV")->required();
  pr_norm->add_option("--stats", pr_stats, "stats sidecar (default: <out>.stats)");
  auto *pr_denorm =
      prosody->add_subcommand("denormalize", "invert a normalization");
  pr_denorm->add_option("--in", pr_in, "normalized prosody TSV")->required();
  pr_denorm->add_option("--stats", pr_stats, "stats sidecar")->required();
  pr_denorm->add_option("--out", pr_out, "restored prosody TSV")->required();

  // score / eer / wer / per ------------------------------------------------
  std::string sc_trials, sc_enroll, sc_embeddings, sc_out;
  int sc_jobs = default_jobs();
  auto *score = app.add_subcommand("score", "cosine-score a trial set");
  score->add_option("--trials", sc_trials, "trial pair file")->required();
  score->add_option("--enroll", sc_enroll, "enrollment sidecar")->required();
  score->add_option("--embeddings", sc_embeddings, "embedding table")->required();
  score->add_option("--out", sc_out, "score file to write")->required();
  score->add_option("--jobs", sc_jobs, "worker threads");

  std::string eer_scores;
  bool eer_raw = false, eer_json = false;
  auto *eer = app.add_subcommand("eer", "equal error rate of a score file");
  eer->add_option("--scores", eer_scores, "score file")->required();
  eer->add_flag("--raw", eer_raw, "print the raw EER (no flip rule)");
  eer->add_flag("--json", eer_json, "print full JSON detail");

  std::string wer_ref, wer_hyp;
  bool wer_no_norm = false, wer_json = false;
  int wer_jobs = default_jobs();
  auto *wer = app.add_subcommand("wer", "corpus word error rate");
  wer->add_option("--ref", wer_ref, "reference transcripts TSV")->required();
  wer->add_option("--hyp", wer_hyp, "hypothesis transcripts TSV")->required();
  wer->add_flag("--no-normalize", wer_no_norm, "skip text normalization");
  wer->add_option("--jobs", wer_jobs, "worker threads");
  wer->add_flag("--json", wer_json, "print full JSON detail");

  std::string per_ref, per_hyp;
  bool per_json = false;
  int per_jobs = default_jobs();
  auto *per = app.add_subcommand("per", "corpus phone error rate");
  per->add_option("--ref", per_ref, "reference transcripts TSV")->required();
  per->add_option("--hyp", per_hyp, "hypothesis transcripts TSV")->required();
  per->add_option("--jobs", per_jobs, "worker threads");
  per->add_flag("--json", per_json, "print full JSON detail");

  // ablate / report ----------------------------------------------------------
  std::string ab_config;
  std::vector<std::string> ab_conditions;
  auto *ablate = app.add_subcommand("ablate", "run evaluation conditions");
  ablate->add_option("--config", ab_config, "run config JSON")->required();
  ablate->add_option("--conditions", ab_conditions, "conditions to run")
      ->required()
      ->delimiter(',');

  std::vector<std::string> rp_runs, rp_trial_counts;
  std::string rp_format = "csv", rp_out;
  auto *report = app.add_subcommand("report", "render evaluation tables");
  report->add_option("--runs", rp_runs, "run directories or report.json files");
  report->add_option("--format", rp_format, "csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  report->add_option("--out", rp_out, "output file (default: stdout)");
  report->add_option("--trial-counts", rp_trial_counts,
                     "trial files to summarize instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    // The banner goes to standard error so stdout carries only data.
    std::cerr << "voxpriv " << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (trialgen->parsed()) run_trialgen(tg);
    else if (anonymize->parsed()) run_anonymize(an);
    else if (prosody->parsed()) {
      if (pr_norm->parsed()) run_prosody_normalize(pr_in, pr_out, pr_stats);
      else run_prosody_denormalize(pr_in, pr_stats, pr_out);
    }
    else if (score->parsed())
      run_score(sc_trials, sc_enroll, sc_embeddings, sc_out, sc_jobs);
    else if (eer->parsed()) run_eer(eer_scores, eer_raw, eer_json);
    else if (wer->parsed()) run_wer(wer_ref, wer_hyp, wer_no_norm, wer_jobs, wer_json);
    else if (per->parsed()) run_per(per_ref, per_hyp, per_jobs, per_json);
    else if (ablate->parsed()) run_ablate(ab_config, ab_conditions);
    else if (report->parsed())
      run_report(rp_runs, rp_format, rp_out, rp_trial_counts);
  } catch (const VoxprivError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
