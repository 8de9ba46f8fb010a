// include/voxpriv/rng.h

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

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace voxpriv {

// Counter-based deterministic generator (splitmix64 output function) whose
// stream is keyed by the user seed plus any number of context strings.
// Two streams with different context are independent, so e.g. adding one
// speaker to a manifest never reshuffles the draws of the others.
//
// The stream key is derived as key = mix(key ^ fnv1a64(part)) over the
// absorbed parts, starting from mix(seed). Output i is mix(key + i * gamma).
// This derivation is part of the on-disk determinism contract: outputs for
// a given (seed, context) are identical across platforms and versions.
class SubstreamRng {
 public:
  explicit SubstreamRng(uint64_t seed);
  SubstreamRng(uint64_t seed, std::initializer_list<std::string_view> context);

  SubstreamRng &absorb(std::string_view part);
  SubstreamRng &absorb(uint64_t part);

  uint64_t next_u64();
  // Uniform in [0, n), n >= 1, via rejection sampling (no modulo bias).
  uint64_t bounded(uint64_t n);
  // Uniform in [0, 1) with 53 random bits.
  double next_double();

  // First k positions of a Fisher-Yates shuffle of [0, n); selection order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace voxpriv
