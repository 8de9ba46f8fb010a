// src/report.cc

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

#include "voxpriv/report.h"

#include <algorithm>
#include <cstdio>
#include <set>

#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

namespace {

// Fixed presentation order of the evaluation conditions; anything else
// sorts after these, alphabetically.
int condition_rank(const std::string &name) {
  static const char *kOrder[] = {"original", "anon", "resys", "gold_resys",
                                 "gold_anon"};
  for (int i = 0; i < 5; ++i)
    if (name == kOrder[i]) return i;
  return 5;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

nlohmann::json eer_cell_to_json(const EerCell &cell) {
  nlohmann::json j;
  if (cell.female) j["female"] = *cell.female;
  if (cell.male) j["male"] = *cell.male;
  j["average"] = cell.average;
  j["flipped_female"] = cell.flipped_female;
  j["flipped_male"] = cell.flipped_male;
  j["single_gender"] = cell.single_gender;
  return j;
}

EerCell eer_cell_from_json(const nlohmann::json &j) {
  EerCell cell;
  if (j.contains("female")) cell.female = j.at("female").get<double>();
  if (j.contains("male")) cell.male = j.at("male").get<double>();
  cell.average = j.at("average").get<double>();
  cell.flipped_female = j.value("flipped_female", false);
  cell.flipped_male = j.value("flipped_male", false);
  cell.single_gender = j.value("single_gender", false);
  return cell;
}

nlohmann::json wer_cell_to_json(const WerCell &cell) {
  return {{"wer", cell.wer},
          {"substitutions", cell.substitutions},
          {"deletions", cell.deletions},
          {"insertions", cell.insertions},
          {"ref_tokens", cell.ref_tokens}};
}

WerCell wer_cell_from_json(const nlohmann::json &j) {
  WerCell cell;
  cell.wer = j.at("wer").get<double>();
  cell.substitutions = j.value("substitutions", int64_t{0});
  cell.deletions = j.value("deletions", int64_t{0});
  cell.insertions = j.value("insertions", int64_t{0});
  cell.ref_tokens = j.value("ref_tokens", int64_t{0});
  return cell;
}

}  // namespace

nlohmann::json EvaluationRow::to_json() const {
  nlohmann::json j;
  j["dataset"] = dataset;
  j["language"] = language;
  j["condition"] = condition;
  nlohmann::json eer_j = nlohmann::json::object();
  for (const auto &[attacker, cell] : eer) eer_j[attacker] = eer_cell_to_json(cell);
  j["eer"] = eer_j;
  nlohmann::json wer_j = nlohmann::json::object();
  for (const auto &[recognizer, cell] : wer)
    wer_j[recognizer] = wer_cell_to_json(cell);
  j["wer"] = wer_j;
  if (per) {
    j["per"] = wer_cell_to_json(*per);
    j["per_source"] = per_source;
  }
  return j;
}

EvaluationRow EvaluationRow::from_json(const nlohmann::json &j) {
  EvaluationRow row;
  row.dataset = j.at("dataset").get<std::string>();
  row.language = j.at("language").get<std::string>();
  row.condition = j.at("condition").get<std::string>();
  if (j.contains("eer"))
    for (const auto &[attacker, cell] : j.at("eer").items())
      row.eer.emplace(attacker, eer_cell_from_json(cell));
  if (j.contains("wer"))
    for (const auto &[recognizer, cell] : j.at("wer").items())
      row.wer.emplace(recognizer, wer_cell_from_json(cell));
  if (j.contains("per")) {
    row.per = wer_cell_from_json(j.at("per"));
    row.per_source = j.value("per_source", std::string{});
  }
  return row;
}

void ReportTable::sort_rows() {
  std::sort(rows.begin(), rows.end(),
            [](const EvaluationRow &a, const EvaluationRow &b) {
              if (a.dataset != b.dataset) return a.dataset < b.dataset;
              if (a.language != b.language) return a.language < b.language;
              const int ra = condition_rank(a.condition);
              const int rb = condition_rank(b.condition);
              if (ra != rb) return ra < rb;
              return a.condition < b.condition;
            });
}

namespace {

struct TableLayout {
  std::vector<std::string> attackers;
  std::vector<std::string> recognizers;
  bool any_per = false;
};

TableLayout layout_of(const std::vector<EvaluationRow> &rows) {
  TableLayout layout;
  std::set<std::string> attackers, recognizers;
  for (const auto &row : rows) {
    for (const auto &[name, cell] : row.eer) attackers.insert(name);
    for (const auto &[name, cell] : row.wer) recognizers.insert(name);
    if (row.per) layout.any_per = true;
  }
  layout.attackers.assign(attackers.begin(), attackers.end());
  layout.recognizers.assign(recognizers.begin(), recognizers.end());
  return layout;
}

std::vector<std::string> header_cells(const TableLayout &layout) {
  std::vector<std::string> cells = {"dataset", "language", "condition"};
  for (const auto &a : layout.attackers) {
    cells.push_back("eer_f[" + a + "]");
    cells.push_back("eer_m[" + a + "]");
    cells.push_back("eer_avg[" + a + "]");
  }
  for (const auto &r : layout.recognizers) cells.push_back("wer[" + r + "]");
  if (layout.any_per) cells.push_back("per");
  return cells;
}

std::vector<std::string> row_cells(const EvaluationRow &row,
                                   const TableLayout &layout) {
  std::vector<std::string> cells = {row.dataset, row.language, row.condition};
  for (const auto &a : layout.attackers) {
    const auto it = row.eer.find(a);
    if (it == row.eer.end()) {
      cells.insert(cells.end(), {"n/a", "n/a", "n/a"});
      continue;
    }
    const EerCell &cell = it->second;
    cells.push_back(cell.female ? format_percent(*cell.female) : "n/a");
    cells.push_back(cell.male ? format_percent(*cell.male) : "n/a");
    cells.push_back(format_percent(cell.average));
  }
  for (const auto &r : layout.recognizers) {
    const auto it = row.wer.find(r);
    cells.push_back(it == row.wer.end() ? "n/a" : format_percent(it->second.wer));
  }
  if (layout.any_per)
    cells.push_back(row.per ? format_percent(row.per->wer) : "n/a");
  return cells;
}

std::string join_csv(const std::vector<std::string> &cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

std::string join_markdown(const std::vector<std::string> &cells) {
  std::string line = "|";
  for (const auto &c : cells) {
    line += ' ';
    line += c;
    line += " |";
  }
  line += '\n';
  return line;
}

}  // namespace

std::string ReportTable::render_csv() const {
  ReportTable sorted = *this;
  sorted.sort_rows();
  const TableLayout layout = layout_of(sorted.rows);
  std::string out = join_csv(header_cells(layout));
  for (const auto &row : sorted.rows) out += join_csv(row_cells(row, layout));
  return out;
}

std::string ReportTable::render_markdown() const {
  ReportTable sorted = *this;
  sorted.sort_rows();
  const TableLayout layout = layout_of(sorted.rows);
  const auto header = header_cells(layout);
  std::string out = join_markdown(header);
  std::vector<std::string> rule(header.size(), "---");
  out += join_markdown(rule);
  for (const auto &row : sorted.rows) out += join_markdown(row_cells(row, layout));
  return out;
}

ReportTable load_reports(const std::vector<fs::path> &paths) {
  std::vector<fs::path> files;
  for (const auto &path : paths) {
    if (fs::is_directory(path)) {
      if (fs::exists(path / "report.json")) files.push_back(path / "report.json");
      std::vector<fs::path> subdirs;
      for (const auto &entry : fs::directory_iterator(path))
        if (entry.is_directory() && fs::exists(entry.path() / "report.json"))
          subdirs.push_back(entry.path() / "report.json");
      std::sort(subdirs.begin(), subdirs.end());
      files.insert(files.end(), subdirs.begin(), subdirs.end());
    } else if (fs::exists(path)) {
      files.push_back(path);
    } else {
      throw VoxprivError("load_reports: no such file or directory: " +
                         path.string());
    }
  }
  if (files.empty()) throw VoxprivError("load_reports: no report.json found");

  ReportTable table;
  for (const auto &file : files) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(file));
    } catch (const nlohmann::json::exception &e) {
      throw VoxprivError(file.string() + ": " + e.what());
    }
    if (j.is_array())
      for (const auto &item : j) table.rows.push_back(EvaluationRow::from_json(item));
    else
      table.rows.push_back(EvaluationRow::from_json(j));
  }
  table.sort_rows();
  return table;
}

std::vector<TrialCountRow> count_trials(const std::vector<fs::path> &files) {
  if (files.empty()) throw VoxprivError("count_trials: no trial files given");
  std::vector<TrialCountRow> rows;
  for (const auto &file : files) {
    const std::string contents = read_file(file);
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < contents.size()) {
      std::size_t end = contents.find('\n', pos);
      if (end == std::string::npos) end = contents.size();
      if (!trim(std::string_view(contents.data() + pos, end - pos)).empty())
        ++count;
      pos = end + 1;
    }
    if (count == 0)
      throw VoxprivError(file.string() + ": empty trial file");

    TrialCountRow row;
    row.trials = count;
    // File names shaped "<dataset>-<language>..." carry their grouping.
    std::string name = file.filename().string();
    if (const auto dot = name.find('.'); dot != std::string::npos)
      name = name.substr(0, dot);
    const auto dash = name.find('-');
    std::string head = (dash == std::string::npos) ? name : name.substr(0, dash);
    if (dash != std::string::npos && (head == "cv" || head == "libri")) {
      row.dataset = head;
      std::string rest = name.substr(dash + 1);
      if (const auto next = rest.find('-'); next != std::string::npos)
        rest = rest.substr(0, next);
      row.language = rest;
    } else {
      row.dataset = "?";
      row.language = name;
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(),
            [](const TrialCountRow &a, const TrialCountRow &b) {
              if (a.dataset != b.dataset) return a.dataset < b.dataset;
              return a.language < b.language;
            });
  return rows;
}

std::string render_trial_counts_csv(const std::vector<TrialCountRow> &rows) {
  std::string out = "dataset,language,trials,thousands\n";
  for (const auto &row : rows) {
    char thousands[32];
    std::snprintf(thousands, sizeof(thousands), "%.1f",
                  static_cast<double>(row.trials) / 1000.0);
    out += row.dataset + "," + row.language + "," + std::to_string(row.trials) +
           "," + thousands + "\n";
  }
  return out;
}

}  // namespace voxpriv
