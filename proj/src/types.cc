// src/types.cc

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

#include "voxpriv/types.h"

#include <array>
#include <algorithm>

namespace voxpriv {

namespace {
constexpr std::array<std::string_view, 9> kLanguages = {
    "en", "de", "fr", "it", "es", "pt", "nl", "ru", "pl"};
}  // namespace

Gender parse_gender(std::string_view s) {
  if (s == "female" || s == "f") return Gender::female;
  if (s == "male" || s == "m") return Gender::male;
  throw VoxprivError("unknown gender '" + std::string(s) +
                     "' (expected female|male)");
}

std::string_view to_string(Gender g) {
  return g == Gender::female ? "female" : "male";
}

Dataset parse_dataset(std::string_view s) {
  if (s == "cv") return Dataset::cv;
  if (s == "libri") return Dataset::libri;
  throw VoxprivError("unknown dataset '" + std::string(s) + "' (expected cv|libri)");
}

std::string_view to_string(Dataset d) {
  return d == Dataset::cv ? "cv" : "libri";
}

LanguageTag LanguageTag::parse(std::string_view code) {
  if (!valid(code))
    throw VoxprivError("unknown language tag '" + std::string(code) +
                       "' (expected one of en de fr it es pt nl pl ru, or 'other')");
  return LanguageTag(std::string(code));
}

bool LanguageTag::valid(std::string_view code) {
  if (code == "other") return true;
  return std::find(kLanguages.begin(), kLanguages.end(), code) != kLanguages.end();
}

TrialLabel parse_trial_label(std::string_view s) {
  if (s == "target") return TrialLabel::target;
  if (s == "nontarget") return TrialLabel::nontarget;
  throw VoxprivError("unknown label '" + std::string(s) +
                     "' (expected target|nontarget)");
}

std::string_view to_string(TrialLabel l) {
  return l == TrialLabel::target ? "target" : "nontarget";
}

}  // namespace voxpriv
