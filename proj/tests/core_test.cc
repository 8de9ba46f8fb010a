// tests/core_test.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "voxpriv/embedding.h"
#include "voxpriv/rng.h"
#include "voxpriv/types.h"
#include "voxpriv/util.h"

#include "testutil.h"

using namespace voxpriv;

TEST_CASE("gender, dataset and label parsing round-trips") {
  CHECK(parse_gender("female") == Gender::female);
  CHECK(parse_gender("f") == Gender::female);
  CHECK(parse_gender("male") == Gender::male);
  CHECK(parse_gender("m") == Gender::male);
  CHECK_THROWS_AS(parse_gender("Female"), VoxprivError);
  CHECK_THROWS_AS(parse_gender(""), VoxprivError);
  CHECK(to_string(Gender::female) == "female");
  CHECK(to_string(Gender::male) == "male");

  CHECK(parse_dataset("cv") == Dataset::cv);
  CHECK(parse_dataset("libri") == Dataset::libri);
  CHECK_THROWS_AS(parse_dataset("librispeech"), VoxprivError);

  CHECK(parse_trial_label("target") == TrialLabel::target);
  CHECK(parse_trial_label("nontarget") == TrialLabel::nontarget);
  CHECK_THROWS_AS(parse_trial_label("TARGET"), VoxprivError);
}

TEST_CASE("language tags accept the evaluation languages and reject typos") {
  for (const char *code : {"en", "de", "fr", "it", "es", "pt", "nl", "ru", "pl"}) {
    CHECK(LanguageTag::valid(code));
    CHECK(LanguageTag::parse(code).str() == code);
    CHECK_FALSE(LanguageTag::parse(code).is_other());
  }
  CHECK(LanguageTag::parse("other").is_other());
  CHECK(LanguageTag().is_other());
  CHECK_FALSE(LanguageTag::valid("EN"));
  CHECK_FALSE(LanguageTag::valid("eng"));
  CHECK_THROWS_AS(LanguageTag::parse("xx"), VoxprivError);
}

TEST_CASE("field splitting and trimming") {
  CHECK(split_fields("a\tb\tc", '\t') == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_fields("a\t\tc", '\t') == std::vector<std::string>{"a", "", "c"});
  CHECK(split_fields("", '\t') == std::vector<std::string>{""});
  CHECK(split_whitespace("  a   b\tc  ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_whitespace("   ").empty());
  CHECK(trim("  x y  ") == "x y");
  CHECK(trim("") == "");
}

TEST_CASE("strict numeric parsing consumes the whole field") {
  CHECK(parse_double("0.25", "t") == doctest::Approx(0.25));
  CHECK(parse_double("-1e-3", "t") == doctest::Approx(-1e-3));
  CHECK(parse_int("42", "t") == 42);
  CHECK(parse_int("-7", "t") == -7);
  CHECK_THROWS_AS(parse_double("0.25x", "t"), VoxprivError);
  CHECK_THROWS_AS(parse_double("", "t"), VoxprivError);
  CHECK_THROWS_AS(parse_int("3.5", "t"), VoxprivError);
  CHECK_THROWS_AS(parse_int("0x10", "t"), VoxprivError);
}

TEST_CASE("format_score is a parse/format fixed point at 9 significant digits") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const double x = dist(gen);
    const std::string s1 = format_score(x);
    const double y = parse_double(s1, "t");
    CHECK(format_score(y) == s1);
    CHECK(std::abs(x - y) <= 1e-8 * std::max(1.0, std::abs(x)));
  }
  CHECK(format_score(0.0) == "0");
  CHECK(format_score(0.5) == "0.5");
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sha256_path hashes files and directories deterministically") {
  test::TempDir dir;
  write_file_atomic(dir / "a.txt", "alpha\n");
  write_file_atomic(dir / "b.txt", "beta\n");
  CHECK(sha256_file(dir / "a.txt") == sha256_hex("alpha\n"));
  const std::string d1 = sha256_path(dir.path());
  CHECK(d1 == sha256_path(dir.path()));
  write_file_atomic(dir / "b.txt", "gamma\n");
  CHECK(sha256_path(dir.path()) != d1);
}

TEST_CASE("write_file_atomic leaves no temp files and read_file round-trips") {
  test::TempDir dir;
  const auto path = dir / "out.txt";
  write_file_atomic(path, "one\n");
  write_file_atomic(path, "two\n");
  CHECK(read_file(path) == "two\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto &e :
       std::filesystem::directory_iterator(dir.path()))
    ++entries;
  CHECK(entries == 1);
  CHECK_THROWS_AS(read_file(dir / "missing.txt"), VoxprivError);
}

TEST_CASE("run_command reports exit codes, logs output, enforces timeouts") {
  test::TempDir dir;
  const auto log = dir / "cmd.log";

  auto ok = run_command("echo hello", log, 0.0);
  CHECK(ok.exit_code == 0);
  CHECK_FALSE(ok.timed_out);
  CHECK(read_file(log).find("hello") != std::string::npos);

  auto fail = run_command("exit 3", dir / "fail.log", 0.0);
  CHECK(fail.exit_code == 3);
  CHECK_FALSE(fail.timed_out);

  auto slow = run_command("sleep 5", dir / "slow.log", 0.2);
  CHECK(slow.timed_out);
}

TEST_CASE("parallel_for covers every index exactly once for any job count") {
  for (int jobs : {1, 2, 3, 8}) {
    std::vector<int> hits(101, 0);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("must not be called"); });
}

TEST_CASE("substream outputs are deterministic and context-keyed") {
  SubstreamRng a(42, {"trialgen", "select", "de", "female"});
  SubstreamRng b(42, {"trialgen", "select", "de", "female"});
  SubstreamRng c(42, {"trialgen", "select", "de", "male"});
  SubstreamRng d(43, {"trialgen", "select", "de", "female"});
  std::vector<uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("absorbing parts incrementally equals the initializer-list form") {
  SubstreamRng whole(9, {"anonymize", "speaker", "spk7"});
  SubstreamRng steps(9);
  steps.absorb("anonymize").absorb("speaker").absorb("spk7");
  for (int i = 0; i < 8; ++i) CHECK(whole.next_u64() == steps.next_u64());
}

TEST_CASE("part boundaries matter in the substream key") {
  SubstreamRng ab(1, {"ab", "c"});
  SubstreamRng a_bc(1, {"a", "bc"});
  bool any_diff = false;
  for (int i = 0; i < 8; ++i)
    if (ab.next_u64() != a_bc.next_u64()) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("bounded draw stays in range and looks uniform") {
  SubstreamRng rng(123, {"test", "bounded"});
  CHECK(rng.bounded(1) == 0);
  std::vector<int> counts(10, 0);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const uint64_t v = rng.bounded(10);
    REQUIRE(v < 10);
    counts[v] += 1;
  }
  for (int c : counts) {
    CHECK(c > draws / 10 - 400);
    CHECK(c < draws / 10 + 400);
  }
}

TEST_CASE("next_double is in [0, 1)") {
  SubstreamRng rng(5, {"test", "double"});
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("sample_indices returns k distinct indices below n") {
  SubstreamRng rng(77, {"test", "sample"});
  auto idx = rng.sample_indices(100, 15);
  REQUIRE(idx.size() == 15);
  std::set<std::size_t> unique(idx.begin(), idx.end());
  CHECK(unique.size() == 15);
  CHECK(*std::max_element(idx.begin(), idx.end()) < 100);

  SubstreamRng rng2(77, {"test", "sample2"});
  auto all = rng2.sample_indices(6, 6);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});

  SubstreamRng rng3(77, {"test", "sample3"});
  CHECK(rng3.sample_indices(4, 0).empty());
  CHECK_THROWS_AS(rng3.sample_indices(3, 4), VoxprivError);
}

TEST_CASE("sample_indices prefix property: same stream, growing k") {
  // Selection order means the first k draws of a larger request match the
  // smaller request on an identical stream.
  SubstreamRng r1(11, {"test", "prefix"});
  SubstreamRng r2(11, {"test", "prefix"});
  const auto small = r1.sample_indices(50, 5);
  const auto large = r2.sample_indices(50, 12);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i] == large[i]);
}

TEST_CASE("embedding vector construction validates input") {
  CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{}), VoxprivError);
  CHECK_THROWS_AS(EmbeddingVector({1.0, std::nan("")}), VoxprivError);
  const EmbeddingVector v({3.0, 4.0});
  CHECK(v.dim() == 2);
  CHECK(v.norm() == doctest::Approx(5.0));
  CHECK(v.normalized().norm() == doctest::Approx(1.0));
  CHECK(v.scaled(2.0)[0] == doctest::Approx(6.0));
  CHECK_THROWS_AS(EmbeddingVector({0.0, 0.0}).normalized(), VoxprivError);
}

TEST_CASE("cosine similarity hand values") {
  const EmbeddingVector x({1.0, 0.0});
  const EmbeddingVector y({0.0, 1.0});
  const EmbeddingVector xy({1.0, 1.0});
  CHECK(cosine_similarity(x, x) == doctest::Approx(1.0));
  CHECK(cosine_similarity(x, y) == doctest::Approx(0.0));
  CHECK(cosine_similarity(x, xy) == doctest::Approx(std::sqrt(0.5)));
  CHECK(cosine_similarity(x, x.scaled(-1.0)) == doctest::Approx(-1.0));
  CHECK(cosine_distance(x, y) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_similarity(x, EmbeddingVector({1.0, 2.0, 3.0})),
                  VoxprivError);
  CHECK_THROWS_AS(cosine_similarity(x, EmbeddingVector({0.0, 0.0})), VoxprivError);
}

TEST_CASE("cosine similarity is scale invariant and clamped") {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 50; ++i) {
    const auto a = test::random_embedding(gen, 16);
    const auto b = test::random_embedding(gen, 16);
    const double s = cosine_similarity(a, b);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    CHECK(cosine_similarity(a.scaled(7.0), b) == doctest::Approx(s).epsilon(1e-12));
    CHECK(cosine_similarity(a, b.scaled(0.001)) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("mean_embedding is the renormalized centroid") {
  const EmbeddingVector a({1.0, 0.0});
  const EmbeddingVector b({0.0, 1.0});
  const auto mean = mean_embedding({&a, &b});
  CHECK(mean.norm() == doctest::Approx(1.0));
  CHECK(mean[0] == doctest::Approx(std::sqrt(0.5)));
  CHECK(mean[1] == doctest::Approx(std::sqrt(0.5)));
  const auto single = mean_embedding({&a});
  CHECK(single == a.normalized());
  CHECK_THROWS_AS(mean_embedding({}), VoxprivError);
  const EmbeddingVector c({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(mean_embedding({&a, &c}), VoxprivError);
  const auto neg = a.scaled(-1.0);
  CHECK_THROWS_AS(mean_embedding({&a, &neg}), VoxprivError);  // zero centroid
}

TEST_CASE("embedding table enforces keys and dimensions") {
  EmbeddingTable table;
  table.insert("u1", EmbeddingVector({1.0, 2.0}));
  table.insert("u2", EmbeddingVector({3.0, 4.0}));
  CHECK(table.size() == 2);
  CHECK(table.dim() == 2);
  CHECK(table.find("u1") != nullptr);
  CHECK(table.find("zz") == nullptr);
  CHECK_THROWS_AS(table.insert("u1", EmbeddingVector({5.0, 6.0})), VoxprivError);
  CHECK_THROWS_AS(table.insert("u3", EmbeddingVector({1.0, 2.0, 3.0})), VoxprivError);
  CHECK_THROWS_AS(table.insert("", EmbeddingVector({1.0, 2.0})), VoxprivError);
  table.validate();
}
