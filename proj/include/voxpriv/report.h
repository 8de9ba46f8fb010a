// include/voxpriv/report.h

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

#include "voxpriv/types.h"

#include "json.hpp"

namespace voxpriv {

// Per-attacker privacy result; single-gender runs leave the other side
// unset and the average equals the present gender, flagged below.
struct EerCell {
  std::optional<double> female;  // reported (post-flip) fractions
  std::optional<double> male;
  double average = 0.0;
  bool flipped_female = false;
  bool flipped_male = false;
  bool single_gender = false;
};

struct WerCell {
  double wer = 0.0;
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t ref_tokens = 0;
};

// One evaluation table row, mirroring the result-table layout: EER per
// attacker model, then WER per recognizer, then PER.
struct EvaluationRow {
  std::string dataset;
  std::string language;
  std::string condition;
  std::map<std::string, EerCell> eer;  // attacker name -> cell
  std::map<std::string, WerCell> wer;  // recognizer name -> cell
  std::optional<WerCell> per;
  std::string per_source;  // recognizer whose phones fed the PER, if any

  nlohmann::json to_json() const;
  static EvaluationRow from_json(const nlohmann::json &j);
};

struct ReportTable {
  std::vector<EvaluationRow> rows;

  // Deterministic order: dataset, language, then the fixed condition order
  // original, anon, resys, gold_resys, gold_anon. Percentages render with
  // two decimals; missing cells as "n/a".
  void sort_rows();
  std::string render_csv() const;
  std::string render_markdown() const;
};

// Loads every "report.json" found under the given paths (directories are
// scanned one level deep; files are taken as-is).
ReportTable load_reports(const std::vector<std::filesystem::path> &paths);

struct TrialCountRow {
  std::string dataset;
  std::string language;
  std::size_t trials = 0;
};

// Per-file trial counts for the published trial lists. Dataset and
// language are read from file names shaped "<dataset>-<language>*"; other
// names keep the bare file stem as language with dataset "?". Empty files
// are an error. The CSV reports counts and thousands with one decimal.
std::vector<TrialCountRow> count_trials(const std::vector<std::filesystem::path> &files);
std::string render_trial_counts_csv(const std::vector<TrialCountRow> &rows);

}  // namespace voxpriv
