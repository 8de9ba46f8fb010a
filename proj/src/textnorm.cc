// src/textnorm.cc

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

#include "voxpriv/textnorm.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "voxpriv/types.h"

namespace voxpriv {

std::string normalize_text(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status) || nfkc == nullptr)
    throw VoxprivError("normalize_text: NFKC normalizer unavailable");

  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString composed = nfkc->normalize(input, status);
  if (U_FAILURE(status))
    throw VoxprivError("normalize_text: NFKC normalization failed");
  composed.toLower(icu::Locale::getRoot());

  icu::UnicodeString out;
  bool pending_space = false;
  bool have_content = false;
  for (int32_t i = 0; i < composed.length();) {
    const UChar32 c = composed.char32At(i);
    i += U16_LENGTH(c);
    if (u_ispunct(c)) continue;  // general category P*
    if (u_isUWhiteSpace(c)) {
      pending_space = have_content;
      continue;
    }
    if (pending_space) out.append(static_cast<char16_t>(' '));
    pending_space = false;
    out.append(c);
    have_content = true;
  }

  std::string result;
  out.toUTF8String(result);
  return result;
}

}  // namespace voxpriv
