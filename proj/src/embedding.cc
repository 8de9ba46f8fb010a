// src/embedding.cc

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

#include "voxpriv/embedding.h"

#include <algorithm>
#include <cmath>

namespace voxpriv {

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty())
    throw VoxprivError("embedding vector must have dim >= 1");
  for (double v : values_) {
    if (!std::isfinite(v))
      throw VoxprivError("embedding vector contains a non-finite value");
  }
}

double EmbeddingVector::norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

EmbeddingVector EmbeddingVector::normalized() const {
  const double n = norm();
  if (n <= 0.0)
    throw VoxprivError("cannot normalize a zero-norm embedding");
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] / n;
  return EmbeddingVector(std::move(out));
}

EmbeddingVector EmbeddingVector::scaled(double factor) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] * factor;
  return EmbeddingVector(std::move(out));
}

double cosine_similarity(const EmbeddingVector &a, const EmbeddingVector &b) {
  if (a.dim() != b.dim())
    throw VoxprivError("cosine: dimension mismatch (" + std::to_string(a.dim()) +
                       " vs " + std::to_string(b.dim()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    dot += av[i] * bv[i];
    na += av[i] * av[i];
    nb += bv[i] * bv[i];
  }
  if (na <= 0.0 || nb <= 0.0)
    throw VoxprivError("cosine: zero-norm embedding");
  const double value = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(value, -1.0, 1.0);
}

double cosine_distance(const EmbeddingVector &a, const EmbeddingVector &b) {
  return 1.0 - cosine_similarity(a, b);
}

EmbeddingVector mean_embedding(const std::vector<const EmbeddingVector *> &vectors) {
  if (vectors.empty())
    throw VoxprivError("mean_embedding: no vectors given");
  const std::size_t dim = vectors.front()->dim();
  std::vector<double> sum(dim, 0.0);
  for (const EmbeddingVector *v : vectors) {
    if (v->dim() != dim)
      throw VoxprivError("mean_embedding: dimension mismatch");
    const auto vals = v->values();
    for (std::size_t i = 0; i < dim; ++i) sum[i] += vals[i];
  }
  const double inv = 1.0 / static_cast<double>(vectors.size());
  for (double &v : sum) v *= inv;
  return EmbeddingVector(std::move(sum)).normalized();
}

std::size_t EmbeddingTable::dim() const {
  return entries.empty() ? 0 : entries.begin()->second.dim();
}

void EmbeddingTable::insert(std::string key, EmbeddingVector v) {
  if (key.empty()) throw VoxprivError("embedding table: empty key");
  if (!entries.empty() && v.dim() != dim())
    throw VoxprivError("embedding table: dimension mismatch for key '" + key +
                       "' (" + std::to_string(v.dim()) + " vs " +
                       std::to_string(dim()) + ")");
  auto [it, inserted] = entries.emplace(std::move(key), std::move(v));
  if (!inserted)
    throw VoxprivError("embedding table: duplicate key '" + it->first + "'");
}

const EmbeddingVector *EmbeddingTable::find(const std::string &key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

void EmbeddingTable::validate() const {
  const std::size_t d = dim();
  for (const auto &[key, v] : entries) {
    if (key.empty()) throw VoxprivError("embedding table: empty key");
    if (v.dim() != d)
      throw VoxprivError("embedding table: dimension mismatch for key '" + key +
                         "' (" + std::to_string(v.dim()) + " vs " +
                         std::to_string(d) + ")");
  }
}

}  // namespace voxpriv
