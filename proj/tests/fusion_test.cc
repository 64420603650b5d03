// Copyright 2026 The USF Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usf/fusion.h"

#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <random>
#include <set>

#include "oracles.h"
#include "usf/error.h"
#include "usf/lm.h"
#include "usf/text.h"

namespace usf {
namespace {

const std::string kM(kDefaultBoundaryMarker);

Hypothesis Hyp(const std::string& text, double base, std::optional<double> nlm = {}) {
  Hypothesis h;
  h.words = SplitWhitespace(text);
  h.base_logprob = base;
  h.nlm_logprob = nlm;
  return h;
}

UnigramFst RareWordFst() {
  const std::vector<std::string> words = {"highlife", "fission", "bacc"};
  return UnigramFst::Build(words, -1.0, FusionLevel::kWord);
}

TEST(FusionTest, CombinedScoreByHand) {
  const auto fst = RareWordFst();
  const auto lm = LmScoreSource::FileAttached();
  Hypothesis h = Hyp("play bacc", -6.0, -8.0);
  FusionParams p;
  p.alpha = 0.75;
  p.beta = 0.3;
  p.gamma = 0.5;
  EXPECT_NEAR(CombinedScore(h, p, &fst, lm), -4.025, 1e-12);
  EXPECT_DOUBLE_EQ(h.usf_logprob, 1.0);
  EXPECT_NEAR(*h.combined, -4.025, 1e-12);
}

TEST(FusionTest, NoFusionTermsGivesNormalizedBase) {
  const auto fst = RareWordFst();
  const auto lm = LmScoreSource::FileAttached();
  Hypothesis h = Hyp("play bacc at it", -6.0, -8.0);
  FusionParams p;
  p.alpha = p.beta = p.gamma = 0.0;
  EXPECT_EQ(CombinedScore(h, p, &fst, lm), -6.0 / 4.0);
}

TEST(FusionTest, UnmatchedHypothesisIgnoresAlpha) {
  const auto fst = RareWordFst();
  const auto lm = LmScoreSource::FileAttached();
  FusionParams zero;
  zero.alpha = 0.0;
  Hypothesis h0 = Hyp("play back at it again", -3.0);
  const double ref = CombinedScore(h0, zero, &fst, lm);
  for (double a : {0.1, 0.75, 5.0}) {
    FusionParams p;
    p.alpha = a;
    Hypothesis h = Hyp("play back at it again", -3.0);
    EXPECT_EQ(CombinedScore(h, p, &fst, lm), ref);
  }
}

TEST(FusionTest, EmptyHypothesisDividesByOne) {
  const auto lm = LmScoreSource::FileAttached();
  Hypothesis h = Hyp("", -2.0);
  FusionParams p;
  p.gamma = 1.0;
  EXPECT_DOUBLE_EQ(CombinedScore(h, p, nullptr, lm), -2.0);
}

TEST(FusionTest, LevelMismatchIsConfigError) {
  const auto fst = RareWordFst();
  const auto lm = LmScoreSource::FileAttached();
  Hypothesis h = Hyp("bacc", -1.0);
  FusionParams p;
  p.level = FusionLevel::kSubword;
  EXPECT_THROW(CombinedScore(h, p, &fst, lm), ConfigError);
}

TEST(FusionTest, MissingNlmWithBetaIsError) {
  const auto lm = LmScoreSource::FileAttached();
  Hypothesis h = Hyp("bacc", -1.0);
  FusionParams p;
  p.beta = 0.3;
  EXPECT_THROW(CombinedScore(h, p, nullptr, lm), ArgumentError);
  p.beta = 0.0;
  EXPECT_NO_THROW(CombinedScore(h, p, nullptr, lm));
}

TEST(FusionTest, ParamValidation) {
  FusionParams p;
  EXPECT_NO_THROW(p.Validate());
  p.alpha = -0.1;
  EXPECT_THROW(p.Validate(), ArgumentError);
  p.alpha = NAN;
  EXPECT_THROW(p.Validate(), ArgumentError);
  p = FusionParams{};
  p.beta = -1.0;
  EXPECT_THROW(p.Validate(), ArgumentError);
  p = FusionParams{};
  p.gamma = -2.0;  // a negative length bonus is legal
  EXPECT_NO_THROW(p.Validate());
}

TEST(FusionTest, PlayBaccPairIsReranked) {
  const auto fst = RareWordFst();
  const auto lm = LmScoreSource::FileAttached();
  NBestList nb;
  nb.utt_id = "u1";
  nb.hyps = {Hyp("play back at it again", -5.0), Hyp("play bacc at it again", -5.0)};
  FusionParams p;
  const auto out = RescoreNbest(nb, p, &fst, lm);
  EXPECT_EQ(out.hyps[0].text(), "play bacc at it again");
  // The input list is untouched.
  EXPECT_EQ(nb.hyps[0].text(), "play back at it again");
  EXPECT_FALSE(nb.hyps[0].combined.has_value());
}

TEST(FusionTest, AllZeroKeepsInputOrder) {
  const auto lm = LmScoreSource::FileAttached();
  NBestList nb;
  nb.utt_id = "u";
  for (int i = 0; i < 5; ++i) nb.hyps.push_back(Hyp("w" + std::to_string(i), -1.0 * (i % 2)));
  FusionParams p;
  p.alpha = 0.0;
  // Same base score for every hypothesis: a tie everywhere.
  for (auto& h : nb.hyps) h.base_logprob = -2.0;
  const auto out = RescoreNbest(nb, p, nullptr, lm);
  for (size_t i = 0; i < nb.hyps.size(); ++i) EXPECT_EQ(out.hyps[i].text(), nb.hyps[i].text());
}

TEST(FusionTest, EmptyListIsArgumentError) {
  const auto lm = LmScoreSource::FileAttached();
  NBestList nb;
  nb.utt_id = "u";
  EXPECT_THROW(RescoreNbest(nb, FusionParams{}, nullptr, lm), ArgumentError);
}

TEST(FusionTest, RerankMatchesExhaustiveArgmax) {
  std::mt19937_64 rng(17);
  std::vector<std::string> vocab;
  for (int i = 0; i < 30; ++i) vocab.push_back("v" + std::to_string(i));
  std::vector<std::string> band(vocab.begin(), vocab.begin() + 10);
  const auto fst = UnigramFst::Build(band, -1.0, FusionLevel::kWord);
  const auto lm = LmScoreSource::FileAttached();
  std::uniform_int_distribution<int> pick(0, 29), len(1, 6);
  std::uniform_real_distribution<double> base(-20.0, -1.0), alpha(0.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    NBestList nb;
    nb.utt_id = "u";
    for (int k = 0; k < 8; ++k) {
      Hypothesis h;
      for (int n = len(rng); n > 0; --n) h.words.push_back(vocab[pick(rng)]);
      h.base_logprob = base(rng);
      nb.hyps.push_back(h);
    }
    FusionParams p;
    p.alpha = alpha(rng);
    size_t best = 0;
    double best_score = -INFINITY;
    for (size_t k = 0; k < nb.hyps.size(); ++k) {
      double usf = 0.0;
      for (const auto& w : nb.hyps[k].words) {
        if (std::find(band.begin(), band.end(), w) != band.end()) usf += 1.0;
      }
      const double s = oracle::FusedScore(nb.hyps[k].base_logprob, usf, 0.0,
                                   nb.hyps[k].words.size(), p.alpha, 0.0, 0.0);
      if (s > best_score) {
        best_score = s;
        best = k;
      }
    }
    const auto out = RescoreNbest(nb, p, &fst, lm);
    EXPECT_EQ(out.hyps[0].words, nb.hyps[best].words);
    EXPECT_NEAR(*out.hyps[0].combined, best_score, 1e-12);
  }
}

TEST(FusionTest, GroupSubwordsOnMarker) {
  const std::vector<std::string> units = {kM + "play", kM + "ba", "cc", kM + "at"};
  const auto groups = GroupSubwords(units, kM);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[1], (std::vector<std::string>{"ba", "cc"}));
}

TEST(FusionTest, SubwordUsfRequiresStoredPath) {
  const auto inv = SubwordInventory::Uniform({"b", "a", "c", "ba", "cc"});
  const std::vector<std::string> words = {"bacc"};
  const auto fst = UnigramFst::Build(words, -1.0, FusionLevel::kSubword, &inv);
  Hypothesis h = Hyp("play bacc", -1.0);
  h.subwords = std::vector<std::string>{kM + "play", kM + "ba", "cc"};
  EXPECT_DOUBLE_EQ(UsfLogprob(h, fst), 1.0);
  h.subwords = std::vector<std::string>{kM + "play", kM + "b", "a", "cc"};
  EXPECT_DOUBLE_EQ(UsfLogprob(h, fst), 0.0);
  h.subwords.reset();
  EXPECT_THROW(UsfLogprob(h, fst), ConfigError);
}

TEST(OnTheFlyTest, WordLevelDeltas) {
  const auto fst = RareWordFst();
  OnTheFlyFuser fuser(fst, 0.75);
  OnTheFlyFuser::State s;
  EXPECT_DOUBLE_EQ(fuser.Advance(s, "fission"), 0.75);
  EXPECT_DOUBLE_EQ(fuser.Advance(s, "fusion"), 0.0);
  EXPECT_DOUBLE_EQ(fuser.Finish(s), 0.0);
}

TEST(OnTheFlyTest, SubwordCompletionAndCancellation) {
  const auto inv = SubwordInventory::Uniform({"a", "b"});
  const std::vector<std::string> words = {"ab"};
  const auto fst = UnigramFst::Build(words, -1.0, FusionLevel::kSubword, &inv);
  OnTheFlyFuser fuser(fst, 1.0);

  OnTheFlyFuser::State done;
  EXPECT_DOUBLE_EQ(fuser.Advance(done, kM + "a"), 0.5);
  EXPECT_DOUBLE_EQ(fuser.Advance(done, "b"), 0.5);
  EXPECT_DOUBLE_EQ(fuser.Finish(done), 0.0);

  OnTheFlyFuser::State abandoned;
  EXPECT_DOUBLE_EQ(fuser.Advance(abandoned, kM + "a"), 0.5);
  EXPECT_DOUBLE_EQ(fuser.Advance(abandoned, kM + "b"), -0.5);
  EXPECT_DOUBLE_EQ(fuser.Finish(abandoned), 0.0);

  OnTheFlyFuser::State failed;
  EXPECT_DOUBLE_EQ(fuser.Advance(failed, kM + "a"), 0.5);
  EXPECT_DOUBLE_EQ(fuser.Advance(failed, "a"), -0.5);
  EXPECT_DOUBLE_EQ(fuser.Advance(failed, "b"), 0.0);
  EXPECT_DOUBLE_EQ(fuser.Finish(failed), 0.0);

  // Extending a completed word past its end takes the word back.
  OnTheFlyFuser::State over;
  double total = 0.0;
  for (const std::string& u : {kM + "a", std::string("b"), std::string("b")}) total += fuser.Advance(over, u);
  total += fuser.Finish(over);
  EXPECT_DOUBLE_EQ(total, 0.0);
}

// Deltas over any unit stream sum to alpha times the second-pass score.
TEST(OnTheFlyTest, DeltasSumToSecondPassScore) {
  std::mt19937_64 rng(23);
  const auto inv = SubwordInventory::Uniform({"a", "b", "c", "ab", "bc"});
  std::vector<std::string> band;
  std::uniform_int_distribution<int> letter(0, 2), len(1, 5);
  auto random_word = [&] {
    std::string w;
    for (int k = len(rng); k > 0; --k) w += "abc"[letter(rng)];
    return w;
  };
  for (int i = 0; i < 25; ++i) band.push_back(random_word());
  std::uniform_real_distribution<double> weight(-2.0, -0.1);
  std::vector<std::pair<std::string, FstEntry>> entries;
  std::set<std::string> seen;
  for (const auto& w : band) {
    if (!seen.insert(w).second) continue;
    const auto path = ViterbiSegmentation(w, inv).units;
    const double aw = weight(rng);
    entries.emplace_back(w, FstEntry{aw, DistributeWeight(path, aw)});
  }
  const auto fst = UnigramFst::FromEntries(FusionLevel::kSubword, entries);
  const double alpha = 0.8;
  OnTheFlyFuser fuser(fst, alpha);
  for (int trial = 0; trial < 2000; ++trial) {
    Hypothesis h;
    std::vector<std::string> units;
    for (int n = 1 + trial % 5; n > 0; --n) {
      const std::string w = (trial % 3 == 0 && !band.empty()) ? band[rng() % band.size()] : random_word();
      h.words.push_back(w);
      auto segs = EnumerateSegmentations(w, inv);
      auto seg = segs[rng() % segs.size()].units;
      seg[0] = kM + seg[0];
      units.insert(units.end(), seg.begin(), seg.end());
    }
    h.subwords = units;
    OnTheFlyFuser::State s;
    double total = 0.0;
    for (const auto& u : units) total += fuser.Advance(s, u);
    total += fuser.Finish(s);
    EXPECT_NEAR(total, alpha * UsfLogprob(h, fst), 1e-12);
  }
}

TEST(LmTest, UnigramAddOneByHand) {
  const auto lm = LmScoreSource::TrainNgram({"a a b"}, 1, 1.0);
  EXPECT_NEAR(lm.ConditionalLogprob(kSentenceStart, "a"), std::log(3.0 / 5.0), 1e-12);
  EXPECT_NEAR(lm.ConditionalLogprob(kSentenceStart, "b"), std::log(2.0 / 5.0), 1e-12);
  const std::vector<std::string> empty;
  EXPECT_EQ(lm.Score(empty), 0.0);
  const std::vector<std::string> ab = {"a", "b"};
  EXPECT_NEAR(lm.Score(ab), std::log(3.0 / 5.0) + std::log(2.0 / 5.0), 1e-12);
}

TEST(LmTest, BigramAddKByHand) {
  const auto lm = LmScoreSource::TrainNgram({"a b", "a a"}, 2, 0.5);
  // Vocabulary {a, b}; history a occurs twice, followed by b once, a once.
  EXPECT_NEAR(lm.ConditionalLogprob("a", "b"), std::log(1.5 / 3.0), 1e-12);
  // <s> followed by a twice.
  EXPECT_NEAR(lm.ConditionalLogprob(kSentenceStart, "a"), std::log(2.5 / 3.0), 1e-12);
}

TEST(LmTest, ScoresAreNonPositiveAndFinite) {
  std::mt19937_64 rng(29);
  const auto lm = LmScoreSource::TrainNgram({"x y z", "y y", "z x y"}, 2, 0.1);
  const std::vector<std::string> vocab = {"x", "y", "z", "oov"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> words;
    for (int n = trial % 7; n > 0; --n) words.push_back(vocab[rng() % vocab.size()]);
    const double s = lm.Score(words);
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_LE(s, 0.0);
  }
}

TEST(LmTest, Errors) {
  EXPECT_THROW(LmScoreSource::TrainNgram({"a"}, 3, 1.0), ArgumentError);
  EXPECT_THROW(LmScoreSource::TrainNgram({"a"}, 1, 0.0), ArgumentError);
  EXPECT_THROW(LmScoreSource::TrainNgram({}, 1, 1.0), ArgumentError);
  const std::vector<std::string> w = {"a"};
  EXPECT_THROW(LmScoreSource::FileAttached().Score(w), ConfigError);
}

}  // namespace
}  // namespace usf
