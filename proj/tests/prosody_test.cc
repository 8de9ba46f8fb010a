// tests/prosody_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "voxpriv/prosody.h"
#include "voxpriv/types.h"
#include "voxpriv/util.h"

#include "testutil.h"

using namespace voxpriv;

namespace {

ProsodySequence make_seq(std::vector<double> pitch, std::vector<double> energy,
                         std::vector<double> duration) {
  ProsodySequence seq;
  for (std::size_t i = 0; i < pitch.size(); ++i)
    seq.phone_labels.push_back("p" + std::to_string(i));
  seq.pitch = std::move(pitch);
  seq.energy = std::move(energy);
  seq.duration = std::move(duration);
  return seq;
}

}  // namespace

TEST_CASE("normalization divides every channel by its mean") {
  const auto seq = make_seq({2.0, 4.0, 6.0}, {3.0, 3.0, 3.0}, {1.0, 2.0, 3.0});
  const auto norm = normalize(seq);
  CHECK(norm.stats.pitch_mean == doctest::Approx(4.0));
  CHECK(norm.stats.energy_mean == doctest::Approx(3.0));
  CHECK(norm.stats.duration_mean == doctest::Approx(2.0));
  CHECK(norm.seq.pitch[0] == doctest::Approx(0.5));
  CHECK(norm.seq.pitch[1] == doctest::Approx(1.0));
  CHECK(norm.seq.pitch[2] == doctest::Approx(1.5));
  CHECK(norm.seq.energy[1] == doctest::Approx(1.0));
  CHECK(norm.seq.duration[0] == doctest::Approx(0.5));
  CHECK(norm.seq.duration[2] == doctest::Approx(1.5));
}

TEST_CASE("unvoiced frames stay zero and are excluded from the pitch mean") {
  const auto seq = make_seq({0.0, 100.0, 300.0}, {1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  const auto norm = normalize(seq);
  CHECK(norm.stats.pitch_mean == doctest::Approx(200.0));  // voiced only
  CHECK(norm.seq.pitch[0] == 0.0);                         // exactly preserved
  CHECK(norm.seq.pitch[1] == doctest::Approx(0.5));
  CHECK(norm.seq.pitch[2] == doctest::Approx(1.5));
}

TEST_CASE("normalized channels have mean one") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> pitch_dist(60.0, 280.0);
  std::uniform_real_distribution<double> pos_dist(0.05, 9.0);
  std::bernoulli_distribution unvoiced(0.3);
  for (int trial = 0; trial < 20; ++trial) {
    ProsodySequence seq;
    const int n = 5 + trial;
    for (int i = 0; i < n; ++i) {
      seq.phone_labels.push_back("p");
      seq.pitch.push_back(unvoiced(gen) && i > 0 ? 0.0 : pitch_dist(gen));
      seq.energy.push_back(pos_dist(gen));
      seq.duration.push_back(pos_dist(gen));
    }
    const auto norm = normalize(seq);
    double voiced_sum = 0.0;
    int voiced_n = 0;
    double energy_sum = 0.0, duration_sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (norm.seq.pitch[i] > 0.0) {
        voiced_sum += norm.seq.pitch[i];
        ++voiced_n;
      }
      energy_sum += norm.seq.energy[i];
      duration_sum += norm.seq.duration[i];
    }
    REQUIRE(voiced_n > 0);
    CHECK(voiced_sum / voiced_n == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(energy_sum / n == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(duration_sum / n == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("normalization is invariant under per-channel scaling") {
  const auto seq = make_seq({0.0, 120.0, 200.0, 90.0}, {0.5, 1.5, 2.5, 3.5},
                            {1.0, 4.0, 2.0, 5.0});
  const auto base = normalize(seq);
  auto scaled = seq;
  for (auto &v : scaled.pitch) v *= 3.0;
  for (auto &v : scaled.energy) v *= 0.25;
  for (auto &v : scaled.duration) v *= 10.0;
  const auto norm2 = normalize(scaled);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(norm2.seq.pitch[i] == doctest::Approx(base.seq.pitch[i]).epsilon(1e-12));
    CHECK(norm2.seq.energy[i] == doctest::Approx(base.seq.energy[i]).epsilon(1e-12));
    CHECK(norm2.seq.duration[i] ==
          doctest::Approx(base.seq.duration[i]).epsilon(1e-12));
  }
  CHECK(norm2.stats.pitch_mean == doctest::Approx(base.stats.pitch_mean * 3.0));
  CHECK(norm2.stats.energy_mean == doctest::Approx(base.stats.energy_mean * 0.25));
}

TEST_CASE("denormalize inverts normalize") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pitch_dist(60.0, 280.0);
  std::uniform_real_distribution<double> pos_dist(0.05, 9.0);
  std::bernoulli_distribution unvoiced(0.25);
  for (int trial = 0; trial < 20; ++trial) {
    ProsodySequence seq;
    const int n = 4 + trial % 9;
    for (int i = 0; i < n; ++i) {
      seq.phone_labels.push_back("ph" + std::to_string(i));
      seq.pitch.push_back(unvoiced(gen) && i > 0 ? 0.0 : pitch_dist(gen));
      seq.energy.push_back(pos_dist(gen));
      seq.duration.push_back(pos_dist(gen));
    }
    const auto restored = denormalize(normalize(seq));
    REQUIRE(restored.size() == seq.size());
    for (int i = 0; i < n; ++i) {
      CHECK(restored.pitch[i] == doctest::Approx(seq.pitch[i]).epsilon(1e-12));
      CHECK(restored.energy[i] == doctest::Approx(seq.energy[i]).epsilon(1e-12));
      CHECK(restored.duration[i] == doctest::Approx(seq.duration[i]).epsilon(1e-12));
      if (seq.pitch[i] == 0.0) CHECK(restored.pitch[i] == 0.0);
    }
    CHECK(restored.phone_labels == seq.phone_labels);
  }
}

TEST_CASE("normalize rejects degenerate channels") {
  // All pitch unvoiced: no voiced mean exists.
  CHECK_THROWS_AS(normalize(make_seq({0.0, 0.0}, {1.0, 1.0}, {1.0, 1.0})),
                  VoxprivError);
  // Zero energy mean.
  CHECK_THROWS_AS(normalize(make_seq({100.0, 120.0}, {0.0, 0.0}, {1.0, 1.0})),
                  VoxprivError);
}

TEST_CASE("sequence validation rejects malformed input") {
  auto ok = make_seq({100.0}, {1.0}, {2.0});
  ok.validate();

  auto mismatch = ok;
  mismatch.energy.push_back(1.0);
  CHECK_THROWS_AS(mismatch.validate(), VoxprivError);

  ProsodySequence empty;
  CHECK_THROWS_AS(empty.validate(), VoxprivError);

  auto neg = make_seq({-1.0}, {1.0}, {1.0});
  CHECK_THROWS_AS(neg.validate(), VoxprivError);

  auto zero_dur = make_seq({100.0}, {1.0}, {0.0});
  CHECK_THROWS_AS(zero_dur.validate(), VoxprivError);

  auto inf = make_seq({100.0}, {std::numeric_limits<double>::infinity()}, {1.0});
  CHECK_THROWS_AS(inf.validate(), VoxprivError);
}

TEST_CASE("prosody file round-trip keeps utterances contiguous") {
  test::TempDir dir;
  const auto path = dir / "prosody.tsv";
  std::map<std::string, ProsodySequence> seqs;
  seqs["u1"] = make_seq({0.0, 110.0}, {1.0, 2.0}, {3.0, 4.0});
  seqs["u2"] = make_seq({220.0}, {0.5}, {1.5});
  write_prosody(seqs, path);
  const auto loaded = read_prosody(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.at("u1").pitch == seqs.at("u1").pitch);
  CHECK(loaded.at("u1").phone_labels == seqs.at("u1").phone_labels);
  CHECK(loaded.at("u2").duration == seqs.at("u2").duration);

  // Interleaved rows for one utterance are rejected.
  write_file_atomic(path,
                    "u1\ta\t100\t1\t1\n"
                    "u2\tb\t120\t1\t1\n"
                    "u1\tc\t130\t1\t1\n");
  CHECK_THROWS_AS(read_prosody(path), VoxprivError);

  write_file_atomic(path, "u1\ta\t100\t1\n");
  CHECK_THROWS_AS(read_prosody(path), VoxprivError);
}

TEST_CASE("prosody stats sidecar round-trips") {
  test::TempDir dir;
  const auto path = dir / "stats.tsv";
  std::map<std::string, ProsodyStats> stats;
  stats["u1"] = {180.5, 2.25, 6.0};
  stats["u2"] = {95.0, 1.0, 3.5};
  write_prosody_stats(stats, path);
  const auto loaded = read_prosody_stats(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.at("u1").pitch_mean == doctest::Approx(180.5));
  CHECK(loaded.at("u2").duration_mean == doctest::Approx(3.5));
}
