// src/prosody.cc

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

#include "voxpriv/prosody.h"

#include <cmath>

#include "voxpriv/types.h"
#include "voxpriv/util.h"

namespace voxpriv {

namespace fs = std::filesystem;

void ProsodySequence::validate() const {
  const std::size_t n = phone_labels.size();
  if (n == 0) throw VoxprivError("prosody sequence is empty");
  if (pitch.size() != n || energy.size() != n || duration.size() != n)
    throw VoxprivError("prosody sequence channels have unequal lengths");
  for (std::size_t i = 0; i < n; ++i) {
    if (phone_labels[i].empty())
      throw VoxprivError("prosody sequence has an empty phone label");
    if (!std::isfinite(pitch[i]) || pitch[i] < 0)
      throw VoxprivError("prosody pitch must be finite and >= 0");
    if (!std::isfinite(energy[i]) || energy[i] < 0)
      throw VoxprivError("prosody energy must be finite and >= 0");
    if (!std::isfinite(duration[i]) || duration[i] <= 0)
      throw VoxprivError("prosody duration must be finite and > 0");
  }
}

namespace {

double mean_all(const std::vector<double> &values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Pitch mean over voiced entries only; zero marks unvoiced.
double mean_voiced(const std::vector<double> &pitch) {
  double sum = 0.0;
  std::size_t voiced = 0;
  for (double v : pitch) {
    if (v > 0.0) {
      sum += v;
      ++voiced;
    }
  }
  if (voiced == 0) return 0.0;
  return sum / static_cast<double>(voiced);
}

}  // namespace

NormalizedProsody normalize(const ProsodySequence &seq) {
  seq.validate();
  NormalizedProsody out;
  out.stats.pitch_mean = mean_voiced(seq.pitch);
  out.stats.energy_mean = mean_all(seq.energy);
  out.stats.duration_mean = mean_all(seq.duration);
  if (out.stats.pitch_mean <= 0.0)
    throw VoxprivError("normalize: pitch channel has no voiced entries (mean 0)");
  if (out.stats.energy_mean <= 0.0)
    throw VoxprivError("normalize: energy channel mean is 0");
  if (out.stats.duration_mean <= 0.0)
    throw VoxprivError("normalize: duration channel mean is 0");

  out.seq = seq;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq.pitch[i] > 0.0) out.seq.pitch[i] = seq.pitch[i] / out.stats.pitch_mean;
    out.seq.energy[i] = seq.energy[i] / out.stats.energy_mean;
    out.seq.duration[i] = seq.duration[i] / out.stats.duration_mean;
  }
  return out;
}

ProsodySequence denormalize(const NormalizedProsody &norm) {
  if (norm.stats.pitch_mean <= 0.0 || norm.stats.energy_mean <= 0.0 ||
      norm.stats.duration_mean <= 0.0)
    throw VoxprivError("denormalize: stats missing or non-positive");
  ProsodySequence out = norm.seq;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.pitch[i] > 0.0) out.pitch[i] *= norm.stats.pitch_mean;
    out.energy[i] *= norm.stats.energy_mean;
    out.duration[i] *= norm.stats.duration_mean;
  }
  out.validate();
  return out;
}

std::map<std::string, ProsodySequence> read_prosody(const fs::path &path) {
  const std::string contents = read_file(path);
  std::map<std::string, ProsodySequence> sequences;
  std::string last_utt;
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
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 5)
      throw VoxprivError(where + ": expected 'utt\\tphone\\tpitch\\tenergy\\t"
                         "duration'");
    const std::string &utt = fields[0];
    if (utt.empty()) throw VoxprivError(where + ": empty utterance id");
    auto it = sequences.find(utt);
    if (it == sequences.end()) {
      it = sequences.emplace(utt, ProsodySequence{}).first;
    } else if (utt != last_utt) {
      throw VoxprivError(where + ": rows of utterance '" + utt +
                         "' are not contiguous");
    }
    last_utt = utt;
    ProsodySequence &seq = it->second;
    seq.phone_labels.push_back(fields[1]);
    seq.pitch.push_back(parse_double(fields[2], where + ": pitch"));
    seq.energy.push_back(parse_double(fields[3], where + ": energy"));
    seq.duration.push_back(parse_double(fields[4], where + ": duration"));
  }
  for (const auto &[utt, seq] : sequences) {
    try {
      seq.validate();
    } catch (const VoxprivError &e) {
      throw VoxprivError(path.string() + ": utterance '" + utt + "': " + e.what());
    }
  }
  return sequences;
}

void write_prosody(const std::map<std::string, ProsodySequence> &sequences,
                   const fs::path &path) {
  std::string out;
  for (const auto &[utt, seq] : sequences) {
    seq.validate();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      out += utt;
      out += '\t';
      out += seq.phone_labels[i];
      out += '\t';
      out += format_score(seq.pitch[i]);
      out += '\t';
      out += format_score(seq.energy[i]);
      out += '\t';
      out += format_score(seq.duration[i]);
      out += '\n';
    }
  }
  write_file_atomic(path, out);
}

std::map<std::string, ProsodyStats> read_prosody_stats(const fs::path &path) {
  const std::string contents = read_file(path);
  std::map<std::string, ProsodyStats> stats;
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
    const auto fields = split_fields(line, '\t');
    if (fields.size() != 4)
      throw VoxprivError(where + ": expected 'utt\\tpitch-mean\\tenergy-mean"
                         "\\tduration-mean'");
    ProsodyStats s;
    s.pitch_mean = parse_double(fields[1], where + ": pitch-mean");
    s.energy_mean = parse_double(fields[2], where + ": energy-mean");
    s.duration_mean = parse_double(fields[3], where + ": duration-mean");
    if (!stats.emplace(fields[0], s).second)
      throw VoxprivError(where + ": duplicate utterance id '" + fields[0] + "'");
  }
  return stats;
}

void write_prosody_stats(const std::map<std::string, ProsodyStats> &stats,
                         const fs::path &path) {
  std::string out;
  for (const auto &[utt, s] : stats) {
    out += utt;
    out += '\t';
    out += format_score(s.pitch_mean);
    out += '\t';
    out += format_score(s.energy_mean);
    out += '\t';
    out += format_score(s.duration_mean);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace voxpriv
