// src/io.cc

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

#include "voxpriv/io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>

#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'V', 'P', 'E', 'B'};
constexpr uint8_t kVersion = 1;

void put_u16_le(std::string &out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32_le(std::string &out, uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8)
    out.push_back(static_cast<char>((v >> shift) & 0xff));
}

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string path)
      : data_(data), path_(std::move(path)) {}

  uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }
  uint16_t u16_le() {
    auto b = take(2);
    return static_cast<uint16_t>(static_cast<unsigned char>(b[0]) |
                                 (static_cast<unsigned char>(b[1]) << 8));
  }
  uint32_t u32_le() {
    auto b = take(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }
  float f32_le() { return std::bit_cast<float>(u32_le()); }
  std::string_view take(std::size_t n) {
    if (pos_ + n > data_.size())
      throw VoxprivError(path_ + ": truncated embedding file");
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string path_;
};

// Shared line-oriented reader that tracks line numbers for error messages.
class LineReader {
 public:
  LineReader(std::string contents, std::string path)
      : contents_(std::move(contents)), path_(std::move(path)) {}

  bool next(std::string_view &line) {
    if (pos_ >= contents_.size()) return false;
    std::size_t end = contents_.find('\n', pos_);
    if (end == std::string::npos) end = contents_.size();
    line = std::string_view(contents_).substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  std::size_t line_no() const { return line_no_; }
  std::string where() const {
    return path_ + ":" + std::to_string(line_no_);
  }

 private:
  std::string contents_;
  std::string path_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

}  // namespace

EmbeddingTable read_embeddings(const fs::path &path) {
  const std::string contents = read_file(path);
  ByteReader r(contents, path.string());
  if (r.take(4) != std::string_view(kMagic, 4))
    throw VoxprivError(path.string() + ": bad magic (not a VPEB embedding file)");
  const uint8_t version = r.u8();
  if (version != kVersion)
    throw VoxprivError(path.string() + ": unsupported version " +
                       std::to_string(version));
  const uint32_t dim = r.u32_le();
  const uint32_t count = r.u32_le();
  if (dim == 0) throw VoxprivError(path.string() + ": dim must be >= 1");

  EmbeddingTable table;
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t key_len = r.u16_le();
    std::string key(r.take(key_len));
    if (key.empty())
      throw VoxprivError(path.string() + ": empty key in record " +
                         std::to_string(i));
    std::vector<double> values(dim);
    bool all_zero = true;
    for (uint32_t d = 0; d < dim; ++d) {
      const float f = r.f32_le();
      if (!std::isfinite(f))
        throw VoxprivError(path.string() + ": non-finite value for key '" + key + "'");
      values[d] = static_cast<double>(f);
      if (f != 0.0f) all_zero = false;
    }
    if (all_zero)
      throw VoxprivError(path.string() + ": zero-norm embedding for key '" + key +
                         "' (upstream extraction failure)");
    if (table.entries.count(key))
      throw VoxprivError(path.string() + ": duplicate key '" + key + "'");
    table.entries.emplace(std::move(key), EmbeddingVector(std::move(values)));
  }
  if (!r.done())
    throw VoxprivError(path.string() + ": trailing bytes after " +
                       std::to_string(count) + " records");
  return table;
}

void write_embeddings(const EmbeddingTable &table, const fs::path &path) {
  if (table.empty())
    throw VoxprivError("write_embeddings: refusing to write an empty table");
  table.validate();
  const std::size_t dim = table.dim();
  if (dim > std::numeric_limits<uint32_t>::max())
    throw VoxprivError("write_embeddings: dim too large");

  std::string out;
  out.append(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  put_u32_le(out, static_cast<uint32_t>(dim));
  put_u32_le(out, static_cast<uint32_t>(table.size()));
  for (const auto &[key, vec] : table.entries) {
    if (key.size() > std::numeric_limits<uint16_t>::max())
      throw VoxprivError("write_embeddings: key too long: '" + key + "'");
    put_u16_le(out, static_cast<uint16_t>(key.size()));
    out.append(key);
    for (double v : vec.values()) {
      const float f = static_cast<float>(v);
      if (!std::isfinite(f))
        throw VoxprivError("write_embeddings: value for key '" + key +
                           "' does not fit float32");
      put_u32_le(out, std::bit_cast<uint32_t>(f));
    }
  }
  write_file_atomic(path, out);
}

std::vector<TrialScore> read_scores(const fs::path &path) {
  LineReader reader(read_file(path), path.string());
  std::vector<TrialScore> scores;
  std::string_view line;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 4)
      throw VoxprivError(reader.where() + ": expected 4 fields "
                         "(model utt score label), got " +
                         std::to_string(fields.size()));
    TrialScore s;
    s.model = fields[0];
    s.utt = fields[1];
    s.value = parse_double(fields[2], reader.where() + ": score");
    s.label = parse_trial_label(fields[3]);
    scores.push_back(std::move(s));
  }
  return scores;
}

void write_scores(const std::vector<TrialScore> &scores, const fs::path &path) {
  std::vector<std::string> lines;
  lines.reserve(scores.size());
  for (const auto &s : scores) {
    lines.push_back(s.model + " " + s.utt + " " + format_score(s.value) + " " +
                    std::string(to_string(s.label)));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto &l : lines) {
    out += l;
    out += '\n';
  }
  write_file_atomic(path, out);
}

TranscriptSet read_transcripts(const fs::path &path, TranscriptSource source) {
  LineReader reader(read_file(path), path.string());
  TranscriptSet set;
  set.source = source;
  std::string_view line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 4)
      throw VoxprivError(reader.where() + ": expected 4 tab-separated fields "
                         "(utt language text phones), got " +
                         std::to_string(fields.size()));
    const std::string &utt = fields[0];
    if (utt.empty()) throw VoxprivError(reader.where() + ": empty utterance id");
    TranscriptEntry entry;
    entry.language = LanguageTag::parse(fields[1]);
    entry.text = fields[2];
    entry.phones = fields[3];
    auto [it, inserted] = set.entries.emplace(utt, std::move(entry));
    if (!inserted)
      throw VoxprivError(reader.where() + ": duplicate utterance id '" + utt + "'");
  }
  return set;
}

void write_transcripts(const TranscriptSet &set, const fs::path &path) {
  std::string out;
  for (const auto &[utt, entry] : set.entries) {
    if (entry.text.find('\t') != std::string::npos ||
        entry.text.find('\n') != std::string::npos)
      throw VoxprivError("write_transcripts: text for '" + utt +
                         "' contains a tab or newline");
    out += utt;
    out += '\t';
    out += entry.language.str();
    out += '\t';
    out += entry.text;
    out += '\t';
    out += entry.phones;
    out += '\n';
  }
  write_file_atomic(path, out);
}

std::map<std::string, std::string> read_utt2spk(const fs::path &path) {
  LineReader reader(read_file(path), path.string());
  std::map<std::string, std::string> utt2spk;
  std::string_view line;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 2)
      throw VoxprivError(reader.where() + ": expected '<utt> <speaker>'");
    auto [it, inserted] = utt2spk.emplace(fields[0], fields[1]);
    if (!inserted)
      throw VoxprivError(reader.where() + ": duplicate utterance id '" +
                         fields[0] + "'");
  }
  return utt2spk;
}

void write_utt2spk(const std::map<std::string, std::string> &utt2spk,
                   const fs::path &path) {
  std::string out;
  for (const auto &[utt, spk] : utt2spk) {
    out += utt;
    out += ' ';
    out += spk;
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace voxpriv
