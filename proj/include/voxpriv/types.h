// include/voxpriv/types.h

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

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace voxpriv {

// Every recoverable failure in the library surfaces as a VoxprivError.
// The CLI maps these to exit code 1; usage problems exit with 2.
class VoxprivError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Gender { female, male };

// Accepts "female"/"male" and the single-letter forms "f"/"m".
Gender parse_gender(std::string_view s);
std::string_view to_string(Gender g);

enum class Dataset { cv, libri };

Dataset parse_dataset(std::string_view s);
std::string_view to_string(Dataset d);

// Lowercase ISO-639-1 code restricted to the nine evaluation languages,
// plus the explicit catch-all "other". Anything else is rejected so that
// typos do not silently become new languages.
class LanguageTag {
 public:
  LanguageTag() : code_("other") {}

  static LanguageTag parse(std::string_view code);
  static bool valid(std::string_view code);

  const std::string &str() const { return code_; }
  bool is_other() const { return code_ == "other"; }

  auto operator<=>(const LanguageTag &) const = default;

 private:
  explicit LanguageTag(std::string code) : code_(std::move(code)) {}
  std::string code_;
};

enum class TrialLabel { target, nontarget };

TrialLabel parse_trial_label(std::string_view s);
std::string_view to_string(TrialLabel l);

// One scored verification trial: cosine similarity in [-1, 1] plus the
// ground-truth label carried through from the trial list.
struct TrialScore {
  std::string model;
  std::string utt;
  double value = 0.0;
  TrialLabel label = TrialLabel::nontarget;

  bool operator==(const TrialScore &) const = default;
};

}  // namespace voxpriv
