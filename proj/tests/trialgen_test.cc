// tests/trialgen_test.cc

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
#include <set>

#include "voxpriv/trialgen.h"
#include "voxpriv/util.h"

#include "testutil.h"

using namespace voxpriv;

namespace {

std::vector<UtteranceRecord> records_named(const std::vector<std::string> &utts) {
  std::vector<UtteranceRecord> out;
  for (const auto &u : utts) {
    UtteranceRecord r;
    r.utt = u;
    r.speaker = "s";
    r.language = LanguageTag::parse("de");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> numbered(const std::string &prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix.c_str(), i);
    out.emplace_back(buf);
  }
  return out;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  const auto cv = TrialGenConfig::defaults_for(Dataset::cv);
  CHECK(cv.enroll_speakers_per_gender == 10);
  CHECK(cv.extra_trial_speakers_per_gender == 5);
  REQUIRE(cv.utterance_cap.has_value());
  CHECK(*cv.utterance_cap == 70);
  CHECK(cv.enroll_fraction == doctest::Approx(0.15));
  CHECK(cv.enroll_min == 5);

  const auto libri = TrialGenConfig::defaults_for(Dataset::libri);
  CHECK_FALSE(libri.utterance_cap.has_value());

  TrialGenConfig bad = cv;
  bad.enroll_fraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), VoxprivError);
  bad = cv;
  bad.enroll_min = 0;
  CHECK_THROWS_AS(bad.validate(), VoxprivError);
  bad = cv;
  bad.utterance_cap = 0;
  CHECK_THROWS_AS(bad.validate(), VoxprivError);
  bad = cv;
  bad.enroll_speakers_per_gender = -1;
  CHECK_THROWS_AS(bad.validate(), VoxprivError);
}

TEST_CASE("cap_utterances keeps small sets intact and caps large ones") {
  SubstreamRng rng(1, {"trialgen", "cap", "de", "female", "s"});
  auto small = cap_utterances(records_named(numbered("u", 50)), 70, rng);
  REQUIRE(small.size() == 50);
  CHECK(std::is_sorted(small.begin(), small.end(),
                       [](const auto &a, const auto &b) { return a.utt < b.utt; }));

  SubstreamRng rng2(1, {"trialgen", "cap", "de", "female", "s"});
  auto capped = cap_utterances(records_named(numbered("u", 100)), 70, rng2);
  REQUIRE(capped.size() == 70);
  CHECK(std::is_sorted(capped.begin(), capped.end(),
                       [](const auto &a, const auto &b) { return a.utt < b.utt; }));
  std::set<std::string> seen;
  for (const auto &r : capped) seen.insert(r.utt);
  CHECK(seen.size() == 70);

  // Identical substream, identical selection.
  SubstreamRng rng3(1, {"trialgen", "cap", "de", "female", "s"});
  auto again = cap_utterances(records_named(numbered("u", 100)), 70, rng3);
  CHECK(again == capped);

  SubstreamRng rng4(1, {"trialgen", "cap", "de", "female", "s"});
  CHECK_THROWS_AS(cap_utterances(records_named(numbered("u", 3)), 0, rng4),
                  VoxprivError);
}

TEST_CASE("select_speakers picks disjoint enrollment and trial-only sets") {
  std::map<Gender, std::vector<std::string>> eligible;
  eligible[Gender::female] = numbered("f", 20);
  eligible[Gender::male] = numbered("m", 30);
  const auto config = TrialGenConfig::defaults_for(Dataset::cv);
  const auto sel = select_speakers(eligible, config, LanguageTag::parse("de"), 7);

  for (const auto &[gender, gsel] : sel.per_gender) {
    CHECK_FALSE(gsel.all_speakers);
    CHECK(gsel.enrollment.size() == 10);
    CHECK(gsel.trial_only.size() == 5);
    std::set<std::string> all(gsel.enrollment.begin(), gsel.enrollment.end());
    all.insert(gsel.trial_only.begin(), gsel.trial_only.end());
    CHECK(all.size() == 15);  // disjoint
  }
  // Drawn from the right pools.
  for (const auto &s : sel.per_gender.at(Gender::female).enrollment)
    CHECK(s[0] == 'f');
  for (const auto &s : sel.per_gender.at(Gender::male).trial_only)
    CHECK(s[0] == 'm');

  // Same seed reproduces, different seed moves.
  const auto sel2 = select_speakers(eligible, config, LanguageTag::parse("de"), 7);
  CHECK(sel2.per_gender.at(Gender::female).enrollment ==
        sel.per_gender.at(Gender::female).enrollment);
  const auto sel3 = select_speakers(eligible, config, LanguageTag::parse("de"), 8);
  CHECK(sel3.per_gender.at(Gender::male).enrollment !=
        sel.per_gender.at(Gender::male).enrollment);
}

TEST_CASE("select_speakers falls back to all speakers when short") {
  std::map<Gender, std::vector<std::string>> eligible;
  eligible[Gender::female] = numbered("f", 12);  // fewer than 10 + 5
  const auto config = TrialGenConfig::defaults_for(Dataset::cv);
  const auto sel = select_speakers(eligible, config, LanguageTag::parse("pl"), 1);
  const auto &gsel = sel.per_gender.at(Gender::female);
  CHECK(gsel.all_speakers);
  CHECK(gsel.enrollment == numbered("f", 12));  // everyone, sorted
  CHECK(gsel.trial_only.empty());

  std::map<Gender, std::vector<std::string>> none;
  none[Gender::male] = {};
  CHECK_THROWS_AS(select_speakers(none, config, LanguageTag::parse("pl"), 1),
                  VoxprivError);
}

TEST_CASE("select_speakers honors a reduced extra-speaker count") {
  std::map<Gender, std::vector<std::string>> eligible;
  eligible[Gender::female] = numbered("f", 14);
  auto config = TrialGenConfig::defaults_for(Dataset::cv);
  config.extra_trial_speakers_per_gender = 4;  // 10 + 4 fits into 14
  const auto sel = select_speakers(eligible, config, LanguageTag::parse("pl"), 1);
  const auto &gsel = sel.per_gender.at(Gender::female);
  CHECK_FALSE(gsel.all_speakers);
  CHECK(gsel.enrollment.size() == 10);
  CHECK(gsel.trial_only.size() == 4);
}

TEST_CASE("split_enrollment sizes follow max(ceil(fraction*n), minimum)") {
  const auto config = TrialGenConfig::defaults_for(Dataset::cv);

  SubstreamRng rng40(0, {"trialgen", "split", "de", "female", "s40"});
  const auto s40 = split_enrollment(numbered("u", 40), config, rng40);
  REQUIRE(s40.has_value());
  CHECK(s40->enrollment.size() == 6);  // ceil(0.15 * 40) = 6 > 5
  CHECK(s40->trial.size() == 34);

  SubstreamRng rng10(0, {"trialgen", "split", "de", "female", "s10"});
  const auto s10 = split_enrollment(numbered("u", 10), config, rng10);
  REQUIRE(s10.has_value());
  CHECK(s10->enrollment.size() == 5);  // minimum dominates
  CHECK(s10->trial.size() == 5);

  SubstreamRng rng6(0, {"trialgen", "split", "de", "female", "s6"});
  const auto s6 = split_enrollment(numbered("u", 6), config, rng6);
  REQUIRE(s6.has_value());
  CHECK(s6->enrollment.size() == 5);
  CHECK(s6->trial.size() == 1);

  SubstreamRng rng5(0, {"trialgen", "split", "de", "female", "s5"});
  CHECK_FALSE(split_enrollment(numbered("u", 5), config, rng5).has_value());
}

TEST_CASE("split_enrollment partitions without overlap and reproduces") {
  const auto config = TrialGenConfig::defaults_for(Dataset::cv);
  const auto utts = numbered("u", 23);
  SubstreamRng rng(3, {"trialgen", "split", "de", "male", "sx"});
  const auto split = split_enrollment(utts, config, rng);
  REQUIRE(split.has_value());
  std::set<std::string> enroll(split->enrollment.begin(), split->enrollment.end());
  std::set<std::string> trial(split->trial.begin(), split->trial.end());
  CHECK(enroll.size() + trial.size() == utts.size());
  for (const auto &u : enroll) CHECK(trial.count(u) == 0);

  SubstreamRng rng2(3, {"trialgen", "split", "de", "male", "sx"});
  const auto split2 = split_enrollment(utts, config, rng2);
  REQUIRE(split2.has_value());
  CHECK(split2->enrollment == split->enrollment);
  CHECK(split2->trial == split->trial);
}

TEST_CASE("build_trials expands the full same-gender Cartesian product") {
  SpeakerSelection sel;
  GenderSelection f;
  f.enrollment = {"A", "B"};
  sel.per_gender[Gender::female] = f;

  std::map<std::string, EnrollmentSplit> splits;
  splits["A"] = {{"a_e1", "a_e2"}, {"a_t1", "a_t2"}};
  splits["B"] = {{"b_e1"}, {"b_t1"}};
  std::map<std::string, Gender> genders = {{"A", Gender::female},
                                           {"B", Gender::female}};

  const auto set = build_trials(sel, splits, {}, genders);
  REQUIRE(set.models.size() == 2);
  CHECK(set.models.at("A").enrollment_utts ==
        std::vector<std::string>{"a_e1", "a_e2"});
  // 2 models x 3 pooled trial utterances.
  CHECK(set.pairs.size() == 6);
  CHECK(set.num_targets() == 3);
  CHECK(std::is_sorted(set.pairs.begin(), set.pairs.end()));
  for (const auto &p : set.pairs) {
    const bool same = (p.utt[0] == 'a' && p.model == "A") ||
                      (p.utt[0] == 'b' && p.model == "B");
    CHECK((p.label == TrialLabel::target) == same);
  }
}

TEST_CASE("build_trials keeps genders apart and adds trial-only speakers") {
  SpeakerSelection sel;
  GenderSelection f;
  f.enrollment = {"F1"};
  f.trial_only = {"F2"};
  GenderSelection m;
  m.enrollment = {"M1"};
  sel.per_gender[Gender::female] = f;
  sel.per_gender[Gender::male] = m;

  std::map<std::string, EnrollmentSplit> splits;
  splits["F1"] = {{"f1_e"}, {"f1_t"}};
  splits["M1"] = {{"m1_e"}, {"m1_t1", "m1_t2"}};
  std::map<std::string, std::vector<std::string>> trial_only;
  trial_only["F2"] = {"f2_t1", "f2_t2", "f2_t3"};
  std::map<std::string, Gender> genders = {
      {"F1", Gender::female}, {"F2", Gender::female}, {"M1", Gender::male}};

  const auto set = build_trials(sel, splits, trial_only, genders);
  // Female pool: f1_t + 3 trial-only = 4; male pool: 2.
  CHECK(set.pairs.size() == 4 + 2);
  CHECK(set.num_targets() == 1 + 2);
  for (const auto &p : set.pairs) {
    const Gender model_gender = set.models.at(p.model).gender;
    const Gender utt_gender = (p.utt[0] == 'f') ? Gender::female : Gender::male;
    CHECK(model_gender == utt_gender);
  }
  // Trial-only pairs are all nontargets against other models.
  for (const auto &p : set.pairs)
    if (p.utt.rfind("f2_", 0) == 0) CHECK(p.label == TrialLabel::nontarget);
}

TEST_CASE("build_trials all-speakers mode pairs everyone with everyone") {
  SpeakerSelection sel;
  GenderSelection g;
  g.enrollment = {"S1", "S2", "S3"};
  g.all_speakers = true;
  sel.per_gender[Gender::male] = g;

  std::map<std::string, EnrollmentSplit> splits;
  std::map<std::string, Gender> genders;
  for (const auto &s : g.enrollment) {
    EnrollmentSplit split;
    split.enrollment = {s + "_e1"};
    for (int i = 0; i < 5; ++i) split.trial.push_back(s + "_t" + std::to_string(i));
    splits[s] = split;
    genders[s] = Gender::male;
  }
  const auto set = build_trials(sel, splits, {}, genders);
  CHECK(set.pairs.size() == 3 * 15);
  CHECK(set.num_targets() == 15);
}

TEST_CASE("build_trials rejects inconsistent inputs") {
  SpeakerSelection sel;
  GenderSelection g;
  g.enrollment = {"A"};
  sel.per_gender[Gender::female] = g;
  std::map<std::string, Gender> genders = {{"A", Gender::female}};

  CHECK_THROWS_AS(build_trials(sel, {}, {}, genders), VoxprivError);

  std::map<std::string, EnrollmentSplit> degenerate;
  degenerate["A"] = {{"a_e"}, {}};
  CHECK_THROWS_AS(build_trials(sel, degenerate, {}, genders), VoxprivError);
}

TEST_CASE("generate_trials end-to-end on a synthetic manifest") {
  std::mt19937_64 gen(11);
  const auto manifest = test::synthetic_manifest(
      gen, Dataset::cv, LanguageTag::parse("de"), 18, 22, 7, 90);
  auto config = TrialGenConfig::defaults_for(Dataset::cv);
  config.seed = 5;
  const auto result = generate_trials(manifest, config);
  const TrialSet &set = result.trials;

  REQUIRE_FALSE(set.pairs.empty());
  const auto owner_of = manifest.utt_to_speaker();
  const auto gender_of = manifest.speaker_genders();

  // Enrollment/trial disjointness across the whole set.
  std::set<std::string> enrollment_utts;
  for (const auto &[id, model] : set.models)
    enrollment_utts.insert(model.enrollment_utts.begin(),
                           model.enrollment_utts.end());
  std::set<std::string> trial_utts;
  for (const auto &p : set.pairs) trial_utts.insert(p.utt);
  for (const auto &u : trial_utts) CHECK(enrollment_utts.count(u) == 0);

  // Gender purity and label correctness.
  for (const auto &p : set.pairs) {
    const auto &model = set.models.at(p.model);
    const std::string &owner = owner_of.at(p.utt);
    CHECK(gender_of.at(owner) == model.gender);
    CHECK((p.label == TrialLabel::target) == (owner == model.speaker));
  }

  // Cartesian count law per gender.
  for (Gender g : {Gender::female, Gender::male}) {
    std::size_t models = 0;
    for (const auto &[id, model] : set.models)
      if (model.gender == g) ++models;
    std::set<std::string> pool;
    for (const auto &p : set.pairs)
      if (set.models.at(p.model).gender == g) pool.insert(p.utt);
    std::size_t pairs = 0;
    for (const auto &p : set.pairs)
      if (set.models.at(p.model).gender == g) ++pairs;
    CHECK(pairs == models * pool.size());
  }

  // Enrollment sizing against the capped utterance count.
  std::map<std::string, std::set<std::string>> trial_by_speaker;
  for (const auto &p : set.pairs) trial_by_speaker[owner_of.at(p.utt)].insert(p.utt);
  for (const auto &[id, model] : set.models) {
    const std::size_t n =
        model.enrollment_utts.size() + trial_by_speaker[model.speaker].size();
    const auto expected = std::max(
        static_cast<std::size_t>(std::ceil(config.enroll_fraction *
                                           static_cast<double>(n))),
        static_cast<std::size_t>(config.enroll_min));
    CHECK(model.enrollment_utts.size() == expected);
    CHECK(n <= 70);  // cap respected
  }

  // Summary tallies match the trial set.
  CHECK(result.summary.at("pairs").get<std::size_t>() == set.pairs.size());
  CHECK(result.summary.at("targets").get<std::size_t>() == set.num_targets());
  CHECK(result.summary.at("models").get<std::size_t>() == set.models.size());
  CHECK(result.summary.at("language").get<std::string>() == "de");
}

TEST_CASE("generate_trials regenerates byte-identically") {
  std::mt19937_64 gen(12);
  const auto manifest = test::synthetic_manifest(
      gen, Dataset::cv, LanguageTag::parse("fr"), 17, 16, 6, 80);
  auto config = TrialGenConfig::defaults_for(Dataset::cv);
  config.seed = 9;

  test::TempDir dir;
  const auto r1 = generate_trials(manifest, config);
  const auto r2 = generate_trials(manifest, config);
  write_trial_set(r1.trials, dir / "p1", dir / "e1");
  write_trial_set(r2.trials, dir / "p2", dir / "e2");
  CHECK(read_file(dir / "p1") == read_file(dir / "p2"));
  CHECK(read_file(dir / "e1") == read_file(dir / "e2"));
  CHECK(r1.summary == r2.summary);

  auto other = config;
  other.seed = 10;
  const auto r3 = generate_trials(manifest, other);
  CHECK(r3.trials.pairs != r1.trials.pairs);
}

TEST_CASE("adding a speaker does not reshuffle existing splits in all-speakers mode") {
  std::mt19937_64 gen(13);
  auto small = test::synthetic_manifest(gen, Dataset::cv,
                                        LanguageTag::parse("it"), 3, 0, 8, 40);
  auto config = TrialGenConfig::defaults_for(Dataset::cv);
  config.seed = 21;
  const auto before = generate_trials(small, config);

  // Add one more female speaker; with 4 < 15 both runs use all speakers,
  // so the original three keep their exact enrollment splits.
  auto larger = small;
  for (int u = 0; u < 12; ++u) {
    UtteranceRecord rec;
    rec.utt = "fnew_u" + std::to_string(u);
    rec.speaker = "fnew";
    rec.gender = Gender::female;
    rec.language = larger.language;
    larger.records.push_back(rec);
  }
  const auto after = generate_trials(larger, config);

  for (const auto &[id, model] : before.trials.models) {
    REQUIRE(after.trials.models.count(id) == 1);
    CHECK(after.trials.models.at(id).enrollment_utts == model.enrollment_utts);
  }
  CHECK(after.trials.models.size() == before.trials.models.size() + 1);
}

TEST_CASE("generate_trials rejects a gender with no eligible speakers") {
  std::mt19937_64 gen(14);
  auto manifest = test::synthetic_manifest(gen, Dataset::cv,
                                           LanguageTag::parse("es"), 4, 0, 10, 30);
  // One male speaker with too few utterances to ever enroll.
  for (int u = 0; u < 3; ++u) {
    UtteranceRecord rec;
    rec.utt = "mtiny_u" + std::to_string(u);
    rec.speaker = "mtiny";
    rec.gender = Gender::male;
    rec.language = manifest.language;
    manifest.records.push_back(rec);
  }
  const auto config = TrialGenConfig::defaults_for(Dataset::cv);
  CHECK_THROWS_AS(generate_trials(manifest, config), VoxprivError);
}

TEST_CASE("generate_trials reports excluded speakers in the summary") {
  std::mt19937_64 gen(15);
  auto manifest = test::synthetic_manifest(gen, Dataset::cv,
                                           LanguageTag::parse("nl"), 6, 0, 10, 40);
  for (int u = 0; u < 4; ++u) {  // below enroll_min + 1 = 6
    UtteranceRecord rec;
    rec.utt = "fsmall_u" + std::to_string(u);
    rec.speaker = "fsmall";
    rec.gender = Gender::female;
    rec.language = manifest.language;
    manifest.records.push_back(rec);
  }
  auto config = TrialGenConfig::defaults_for(Dataset::cv);
  config.seed = 2;
  const auto result = generate_trials(manifest, config);
  CHECK(result.summary.at("excluded_speakers").get<std::size_t>() == 1);
  CHECK(result.trials.models.count("fsmall") == 0);
  for (const auto &p : result.trials.pairs) CHECK(p.utt.rfind("fsmall", 0) != 0);
}
