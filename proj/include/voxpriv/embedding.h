// include/voxpriv/embedding.h

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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "voxpriv/types.h"

namespace voxpriv {

// Fixed-dimension speaker embedding. Values are kept as doubles in memory
// (the disk format is float32, see io.h) and all reductions accumulate in
// double. Construction requires dim >= 1 and finite values; a zero norm is
// representable in memory but rejected at file ingestion and by the cosine
// operations.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  // Unit-norm copy; throws on zero norm.
  EmbeddingVector normalized() const;
  EmbeddingVector scaled(double factor) const;

  bool operator==(const EmbeddingVector &) const = default;

 private:
  std::vector<double> values_;
};

// <a,b> / (|a| |b|), clamped to [-1, 1]. Throws on dimension mismatch or a
// zero-norm argument.
double cosine_similarity(const EmbeddingVector &a, const EmbeddingVector &b);

// 1 - cosine_similarity, in [0, 2].
double cosine_distance(const EmbeddingVector &a, const EmbeddingVector &b);

// Unit-norm mean of the given vectors, the standard centroid used both for
// enrollment models and for speaker-level anonymization references.
EmbeddingVector mean_embedding(const std::vector<const EmbeddingVector *> &vectors);

// Keyed collection of same-dimension embeddings. The key is an utterance or
// speaker id depending on context; std::map keeps iteration deterministic.
struct EmbeddingTable {
  std::map<std::string, EmbeddingVector> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  // Dimension shared by all entries; 0 for an empty table.
  std::size_t dim() const;

  // Checked insertion: rejects duplicate keys and dimension mismatches.
  void insert(std::string key, EmbeddingVector v);
  const EmbeddingVector *find(const std::string &key) const;
  // Throws if entries disagree on dimension or contain an empty key.
  void validate() const;
};

}  // namespace voxpriv
