// include/voxpriv/io.h

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
#include "voxpriv/types.h"

namespace voxpriv {

// Binary embedding table:
//   magic "VPEB" | version u8=1 | dim u32 LE | count u32 LE |
//   count * [key-len u16 LE | key UTF-8 | dim * f32 LE]
// Values are float32 on disk and widened to double in memory. Reading
// rejects bad magic, header/payload disagreement, duplicate or empty keys,
// non-finite values and zero-norm vectors (a zero norm means the upstream
// extractor failed; it must not be silently normalized away).
EmbeddingTable read_embeddings(const std::filesystem::path &path);
void write_embeddings(const EmbeddingTable &table, const std::filesystem::path &path);

// Score file: "<model-id> <utt-id> <score> <target|nontarget>" per line,
// scores printed with 9 significant digits, lines sorted on write.
std::vector<TrialScore> read_scores(const std::filesystem::path &path);
void write_scores(const std::vector<TrialScore> &scores,
                  const std::filesystem::path &path);

enum class TranscriptSource { gold, asr };

struct TranscriptEntry {
  LanguageTag language;
  std::string text;
  std::string phones;  // space-separated phone tokens; empty = absent

  bool operator==(const TranscriptEntry &) const = default;
};

struct TranscriptSet {
  TranscriptSource source = TranscriptSource::gold;
  std::map<std::string, TranscriptEntry> entries;

  bool operator==(const TranscriptSet &) const = default;
};

// Transcript TSV: "utt-id \t language \t text \t phones" (phones may be
// empty). The per-utterance language tag is what downstream synthesis
// receives, so it is part of the format rather than file metadata.
TranscriptSet read_transcripts(const std::filesystem::path &path,
                               TranscriptSource source);
void write_transcripts(const TranscriptSet &set, const std::filesystem::path &path);

// utt2spk map: "<utt-id> <speaker-id>" per line, sorted on write.
std::map<std::string, std::string> read_utt2spk(const std::filesystem::path &path);
void write_utt2spk(const std::map<std::string, std::string> &utt2spk,
                   const std::filesystem::path &path);

}  // namespace voxpriv
