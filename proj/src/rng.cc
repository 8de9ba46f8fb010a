// src/rng.cc

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

#include "voxpriv/rng.h"

#include <numeric>

#include "voxpriv/types.h"

namespace voxpriv {

namespace {

constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

uint64_t mix64(uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SubstreamRng::SubstreamRng(uint64_t seed) : key_(mix64(seed + kGamma)) {}

SubstreamRng::SubstreamRng(uint64_t seed,
                           std::initializer_list<std::string_view> context)
    : SubstreamRng(seed) {
  for (std::string_view part : context) absorb(part);
}

SubstreamRng &SubstreamRng::absorb(std::string_view part) {
  key_ = mix64(key_ ^ fnv1a64(part));
  return *this;
}

SubstreamRng &SubstreamRng::absorb(uint64_t part) {
  key_ = mix64(key_ ^ part);
  return *this;
}

uint64_t SubstreamRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

uint64_t SubstreamRng::bounded(uint64_t n) {
  if (n == 0) throw VoxprivError("SubstreamRng::bounded: n must be >= 1");
  const uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  while (true) {
    uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double SubstreamRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> SubstreamRng::sample_indices(std::size_t n, std::size_t k) {
  if (k > n) throw VoxprivError("SubstreamRng::sample_indices: k > n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace voxpriv
