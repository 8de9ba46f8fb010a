// src/manifest.cc

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

#include "voxpriv/manifest.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

void Manifest::validate() const {
  if (records.empty()) throw VoxprivError("manifest has no records");
  std::set<std::string> seen;
  for (const auto &rec : records) {
    if (rec.utt.empty()) throw VoxprivError("manifest record with empty utt id");
    if (rec.speaker.empty())
      throw VoxprivError("manifest record '" + rec.utt + "' with empty speaker");
    if (!(rec.language == language))
      throw VoxprivError("manifest record '" + rec.utt + "' has language '" +
                         std::string(rec.language.str()) +
                         "', manifest language is '" + std::string(language.str()) +
                         "'");
    if (rec.duration_s && *rec.duration_s < 0)
      throw VoxprivError("manifest record '" + rec.utt + "' has negative duration");
    if (!seen.insert(rec.utt).second)
      throw VoxprivError("duplicate utterance id '" + rec.utt + "'");
  }
}

std::map<std::string, Gender> Manifest::speaker_genders() const {
  std::map<std::string, Gender> out;
  for (const auto &rec : records) {
    auto [it, inserted] = out.emplace(rec.speaker, rec.gender);
    if (!inserted && it->second != rec.gender)
      throw VoxprivError("speaker '" + rec.speaker +
                         "' appears with conflicting genders");
  }
  return out;
}

std::map<std::string, std::string> Manifest::utt_to_speaker() const {
  std::map<std::string, std::string> out;
  for (const auto &rec : records) out.emplace(rec.utt, rec.speaker);
  return out;
}

ManifestFormat parse_manifest_format(std::string_view s) {
  if (s == "cv_tsv") return ManifestFormat::cv_tsv;
  if (s == "libri_dir") return ManifestFormat::libri_dir;
  throw VoxprivError("unknown manifest format '" + std::string(s) +
                     "' (expected cv_tsv or libri_dir)");
}

std::string cv_speaker_id(std::string_view client_id) {
  return sha256_hex(client_id).substr(0, 16);
}

namespace {

std::string utt_id_from_path(std::string_view audio_path) {
  const fs::path p{std::string(audio_path)};
  return p.stem().string();
}

std::optional<Gender> try_parse_gender(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "female" || lower == "f" || lower == "female_feminine")
    return Gender::female;
  if (lower == "male" || lower == "m" || lower == "male_masculine")
    return Gender::male;
  return std::nullopt;
}

ManifestParseResult parse_cv_tsv(const fs::path &path, Dataset dataset,
                                 const LanguageTag &language) {
  const std::string contents = read_file(path);
  ManifestParseResult result;
  result.manifest.dataset = dataset;
  result.manifest.language = language;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  int col_client = -1, col_path = -1, col_sentence = -1, col_gender = -1;
  int col_duration = -1;
  std::size_t ncols = 0;

  auto where = [&] { return path.string() + ":" + std::to_string(line_no); };

  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split_fields(line, '\t');
    if (line_no == 1) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "client_id") col_client = static_cast<int>(i);
        else if (fields[i] == "path") col_path = static_cast<int>(i);
        else if (fields[i] == "sentence") col_sentence = static_cast<int>(i);
        else if (fields[i] == "gender") col_gender = static_cast<int>(i);
        else if (fields[i] == "duration_s") col_duration = static_cast<int>(i);
      }
      if (col_client < 0 || col_path < 0 || col_sentence < 0 || col_gender < 0)
        throw VoxprivError(path.string() +
                           ": header must name client_id, path, sentence and "
                           "gender columns");
      ncols = fields.size();
      continue;
    }
    if (fields.size() != ncols)
      throw VoxprivError(where() + ": expected " + std::to_string(ncols) +
                         " columns, got " + std::to_string(fields.size()));

    const auto gender = try_parse_gender(fields[static_cast<std::size_t>(col_gender)]);
    if (!gender) {
      ++result.dropped_missing_gender;
      continue;
    }
    UtteranceRecord rec;
    const std::string &client = fields[static_cast<std::size_t>(col_client)];
    if (client.empty()) throw VoxprivError(where() + ": empty client_id");
    rec.speaker = cv_speaker_id(client);
    rec.utt = utt_id_from_path(fields[static_cast<std::size_t>(col_path)]);
    if (rec.utt.empty()) throw VoxprivError(where() + ": empty path");
    rec.gender = *gender;
    rec.language = language;
    rec.text = fields[static_cast<std::size_t>(col_sentence)];
    if (col_duration >= 0) {
      const std::string &d = fields[static_cast<std::size_t>(col_duration)];
      if (!d.empty()) rec.duration_s = parse_double(d, where() + ": duration_s");
    }
    result.manifest.records.push_back(std::move(rec));
  }
  if (line_no == 0) throw VoxprivError(path.string() + ": empty manifest file");
  if (result.manifest.records.empty())
    throw VoxprivError(path.string() + ": no usable records after parsing");
  result.manifest.validate();
  return result;
}

std::map<std::string, Gender> read_speaker_sidecar(const fs::path &path) {
  const std::string contents = read_file(path);
  std::map<std::string, Gender> genders;
  std::size_t pos = 0, line_no = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 2)
      throw VoxprivError(path.string() + ":" + std::to_string(line_no) +
                         ": expected '<speaker-id>\\t<gender>'");
    const auto gender = try_parse_gender(fields[1]);
    if (!gender)
      throw VoxprivError(path.string() + ":" + std::to_string(line_no) +
                         ": unknown gender '" + fields[1] + "'");
    if (!genders.emplace(fields[0], *gender).second)
      throw VoxprivError(path.string() + ":" + std::to_string(line_no) +
                         ": duplicate speaker '" + fields[0] + "'");
  }
  if (genders.empty())
    throw VoxprivError(path.string() + ": empty speaker sidecar");
  return genders;
}

ManifestParseResult parse_libri_dir(const fs::path &root, Dataset dataset,
                                    const LanguageTag &language) {
  if (!fs::is_directory(root))
    throw VoxprivError(root.string() + ": not a directory");
  const auto genders = read_speaker_sidecar(root / "speakers.tsv");

  ManifestParseResult result;
  result.manifest.dataset = dataset;
  result.manifest.language = language;

  std::vector<fs::path> trans_files;
  for (const auto &entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 10 && name.ends_with(".trans.txt"))
      trans_files.push_back(entry.path());
  }
  std::sort(trans_files.begin(), trans_files.end());
  if (trans_files.empty())
    throw VoxprivError(root.string() + ": no .trans.txt files found");

  for (const auto &file : trans_files) {
    // Speaker id = first path component below the root.
    const fs::path rel = fs::relative(file, root);
    const std::string speaker = rel.begin()->string();
    const auto gender_it = genders.find(speaker);
    if (gender_it == genders.end())
      throw VoxprivError(file.string() + ": speaker '" + speaker +
                         "' missing from speakers.tsv");

    const std::string contents = read_file(file);
    std::size_t pos = 0, line_no = 0;
    while (pos < contents.size()) {
      std::size_t end = contents.find('\n', pos);
      if (end == std::string::npos) end = contents.size();
      std::string_view line(contents.data() + pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      pos = end + 1;
      ++line_no;
      if (trim(line).empty()) continue;
      const std::size_t space = line.find(' ');
      if (space == std::string_view::npos || space == 0)
        throw VoxprivError(file.string() + ":" + std::to_string(line_no) +
                           ": expected '<utt-id> <text>'");
      UtteranceRecord rec;
      rec.utt = std::string(line.substr(0, space));
      rec.speaker = speaker;
      rec.gender = gender_it->second;
      rec.language = language;
      rec.text = std::string(line.substr(space + 1));
      result.manifest.records.push_back(std::move(rec));
    }
  }
  if (result.manifest.records.empty())
    throw VoxprivError(root.string() + ": no usable records after parsing");
  result.manifest.validate();
  return result;
}

}  // namespace

ManifestParseResult parse_manifest(const fs::path &path, ManifestFormat format,
                                   Dataset dataset, const LanguageTag &language) {
  switch (format) {
    case ManifestFormat::cv_tsv:
      return parse_cv_tsv(path, dataset, language);
    case ManifestFormat::libri_dir:
      return parse_libri_dir(path, dataset, language);
  }
  throw VoxprivError("unreachable manifest format");
}

}  // namespace voxpriv
