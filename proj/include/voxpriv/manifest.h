// include/voxpriv/manifest.h

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

namespace voxpriv {

struct UtteranceRecord {
  std::string utt;
  std::string speaker;
  Gender gender = Gender::female;
  LanguageTag language;
  std::string text;                    // orthographic transcript, may be empty
  std::string phones;                  // space-separated phone tokens, may be empty
  std::optional<double> duration_s;

  bool operator==(const UtteranceRecord &) const = default;
};

struct Manifest {
  Dataset dataset = Dataset::cv;
  LanguageTag language;
  std::vector<UtteranceRecord> records;

  // Throws unless every record carries the manifest language, utterance ids
  // are unique, and at least one record is present.
  void validate() const;
  std::map<std::string, Gender> speaker_genders() const;
  std::map<std::string, std::string> utt_to_speaker() const;
};

enum class ManifestFormat { cv_tsv, libri_dir };

ManifestFormat parse_manifest_format(std::string_view s);

struct ManifestParseResult {
  Manifest manifest;
  // CV rows whose gender field is empty or unrecognized are dropped, not
  // guessed; the count is surfaced so callers can report it.
  std::size_t dropped_missing_gender = 0;
};

// cv_tsv: a CommonVoice-style TSV whose header names at least the columns
// client_id, path, sentence and gender. The speaker id is the first 16 hex
// chars of sha256(client_id); the utterance id is the path basename without
// extension.
//
// libri_dir: a LibriSpeech-style directory tree <root>/<speaker>/.../
// <chapter>.trans.txt with one "<utt-id> <text>" line per utterance, plus a
// sidecar <root>/speakers.tsv with "<speaker-id>\t<gender>" lines (audio
// paths do not encode gender).
//
// Malformed rows abort with the file position; nothing is silently coerced.
ManifestParseResult parse_manifest(const std::filesystem::path &path,
                                   ManifestFormat format, Dataset dataset,
                                   const LanguageTag &language);

// First 16 hex chars of sha256(client_id), the manifest speaker identity
// for CommonVoice rows.
std::string cv_speaker_id(std::string_view client_id);

}  // namespace voxpriv
