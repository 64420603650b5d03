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

#include "usf/lab.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "oracles.h"
#include "usf/demo.h"
#include "usf/error.h"
#include "usf/logmath.h"

namespace usf {
namespace {

const double kC = kWorkedInstanceScale;

struct RandomLab {
  EmissionModel em;
  std::vector<std::string> lexicon;
};

RandomLab MakeRandomLab(std::mt19937_64& rng) {
  std::vector<std::string> units = {"a", "b", "c"};
  const std::vector<std::string> extra = {"ab", "bc", "ca", "aa", "abc"};
  for (const auto& u : extra) {
    if (rng() % 2) units.push_back(u);
  }
  units.push_back("</s>");
  const size_t steps = 2 + rng() % 3;
  std::vector<double> table;
  for (size_t t = 0; t < steps; ++t) {
    const auto row = oracle::RandomLogRow(rng, units.size());
    table.insert(table.end(), row.begin(), row.end());
  }
  EmissionModel em(units, steps, table);
  std::vector<std::string> lexicon;
  const size_t n = 2 + rng() % 5;
  for (size_t i = 0; i < n; ++i) {
    std::string w;
    for (size_t k = 1 + rng() % 4; k > 0; --k) w += "abc"[rng() % 3];
    lexicon.push_back(w);
  }
  return {std::move(em), std::move(lexicon)};
}

// Every length-T unit sequence that spells a lexicon word followed only by
// end units, with its emission score.
std::map<std::string, std::vector<std::pair<std::vector<std::string>, double>>>
ExhaustivePaths(const EmissionModel& em, const std::vector<std::string>& lexicon) {
  std::map<std::string, std::vector<std::pair<std::vector<std::string>, double>>> out;
  const std::set<std::string> lex(lexicon.begin(), lexicon.end());
  oracle::ForEachSequence(em.num_units(), em.steps(), [&](const std::vector<size_t>& seq) {
    std::string text;
    std::vector<std::string> units;
    double score = 0.0;
    bool ended = false;
    for (size_t t = 0; t < seq.size(); ++t) {
      score += em.log_prob(t, seq[t]);
      if (seq[t] == em.end_index()) {
        ended = true;
      } else {
        if (ended) return;
        units.push_back(em.units()[seq[t]]);
        text += units.back();
      }
    }
    if (lex.count(text)) out[text].emplace_back(units, score);
  });
  return out;
}

TEST(LabTest, UniformSequenceScore) {
  const EmissionModel em({"a", "</s>"}, 2, std::vector<double>(4, std::log(0.5)));
  const std::vector<std::string> seq = {"a", "a"};
  EXPECT_NEAR(SeqLogprob(em, seq), 2 * std::log(0.5), 1e-12);
  EXPECT_NEAR(SeqLogprob(em, {}), 2 * std::log(0.5), 1e-12);
}

TEST(LabTest, SequenceErrors) {
  const EmissionModel em({"a", "</s>"}, 2, std::vector<double>(4, std::log(0.5)));
  const std::vector<std::string> too_long = {"a", "a", "a"};
  EXPECT_THROW(SeqLogprob(em, too_long), ArgumentError);
  const std::vector<std::string> unknown = {"q"};
  EXPECT_THROW(SeqLogprob(em, unknown), ArgumentError);
}

TEST(LabTest, ModelValidation) {
  const double h = std::log(0.5);
  EXPECT_THROW(EmissionModel({"a", "</s>"}, 1, {h}), ArgumentError);
  EXPECT_THROW(EmissionModel({"a", "b"}, 1, {h, h}), ArgumentError);
  EXPECT_THROW(EmissionModel({"a", "</s>"}, 1, {h, std::log(0.6)}), ArgumentError);
  EXPECT_THROW(EmissionModel({"a", "a", "</s>"}, 1, {h, h, h}), ArgumentError);
  EXPECT_NO_THROW(EmissionModel({"a", "<end>"}, 1, {h, h}, "<end>"));
}

TEST(LabTest, ModelJsonRoundTrip) {
  const auto em = WorkedInstanceModel();
  const std::string text = FormatEmissionModelJson(em);
  const auto back = ParseEmissionModelJson(text);
  EXPECT_EQ(back.units(), em.units());
  EXPECT_EQ(back.log_table(), em.log_table());
  EXPECT_EQ(FormatEmissionModelJson(back), text);
  const auto nested = ParseEmissionModelJson(
      R"({"steps":1,"units":["a","</s>"],"log_table":[[-0.6931471805599453,-0.6931471805599453]]})");
  EXPECT_EQ(nested.steps(), 1u);
  EXPECT_THROW(ParseEmissionModelJson("{\"steps\":1}"), ParseError);
  EXPECT_THROW(ParseEmissionModelJson("not json"), ParseError);
}

TEST(LabTest, SequenceScoresSumToOne) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n_units = 2 + rng() % 3;
    const size_t steps = 1 + rng() % 6;
    std::vector<std::string> units;
    for (size_t i = 0; i + 1 < n_units; ++i) units.push_back(std::string(1, static_cast<char>('a' + i)));
    units.push_back("</s>");
    std::vector<double> table;
    for (size_t t = 0; t < steps; ++t) {
      const auto row = oracle::RandomLogRow(rng, n_units);
      table.insert(table.end(), row.begin(), row.end());
    }
    const EmissionModel em(units, steps, table);
    double total = 0.0;
    oracle::ForEachSequence(n_units, steps, [&](const std::vector<size_t>& seq) {
      double s = 0.0;
      for (size_t t = 0; t < steps; ++t) s += em.log_prob(t, seq[t]);
      total += std::exp(s);
    });
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(LabTest, WorkedInstancePosteriors) {
  const auto em = WorkedInstanceModel();
  const auto words = WorkedInstanceLexicon();
  const Lexicon lex(words, em.inventory());
  const std::vector<std::string> ab = {"ab"}, a_b = {"a", "b"}, a_d = {"a", "d"};
  EXPECT_NEAR(SeqLogprob(em, ab), std::log(kC * 0.4), 1e-12);
  EXPECT_NEAR(SeqLogprob(em, a_b), std::log(kC * 0.25), 1e-12);
  EXPECT_NEAR(SeqLogprob(em, a_d), std::log(kC * 0.45), 1e-12);
  EXPECT_NEAR(WordPosteriorSum(em, lex, "ab"), std::log(kC * 0.65), 1e-12);
  EXPECT_NEAR(WordPosteriorMax(em, lex, "ab"), std::log(kC * 0.4), 1e-12);
  EXPECT_NEAR(WordPosteriorSum(em, lex, "ad"), WordPosteriorMax(em, lex, "ad"), 1e-15);
  EXPECT_EQ(SumDecision(em, lex), "ab");
  EXPECT_EQ(MaxDecision(em, lex), "ad");
  EXPECT_THROW(WordPosteriorSum(em, lex, "zz"), ArgumentError);
}

TEST(LabTest, WorkedInstanceBeamFlipsWithFusion) {
  const auto em = WorkedInstanceModel();
  const auto words = WorkedInstanceLexicon();
  const Lexicon lex(words, em.inventory());
  EXPECT_EQ(BeamSearch(em, lex, 64).hyps.at(0).words[0], "ad");

  const std::vector<std::string> band = {"ab"};
  const auto fst = UnigramFst::Build(band, -1.0, FusionLevel::kWord);
  const double threshold = std::log(0.45 / 0.4);
  const OnTheFlyFuser below(fst, threshold - 1e-6);
  EXPECT_EQ(BeamSearch(em, lex, 64, &below).hyps.at(0).words[0], "ad");
  const OnTheFlyFuser above(fst, threshold + 1e-6);
  EXPECT_EQ(BeamSearch(em, lex, 64, &above).hyps.at(0).words[0], "ab");
}

TEST(LabTest, WorkedInstanceReport) {
  const auto em = WorkedInstanceModel();
  const auto words = WorkedInstanceLexicon();
  const Lexicon lex(words, em.inventory());
  const std::vector<std::string> band = {"ab"};
  const auto fst = UnigramFst::Build(band, -1.0, FusionLevel::kWord);
  const auto rows = SearchErrorReport(em, lex, &fst, DefaultAlphaGrid());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].word, "ab");
  EXPECT_TRUE(rows[0].search_error);
  EXPECT_EQ(rows[0].n_segs, 2u);
  EXPECT_NEAR(rows[0].gap, std::log(0.65 / 0.4), 1e-12);
  ASSERT_TRUE(rows[0].repair_alpha.has_value());
  EXPECT_DOUBLE_EQ(*rows[0].repair_alpha, 0.25);
  EXPECT_FALSE(rows[1].search_error);
  EXPECT_EQ(rows[1].gap, 0.0);

  const std::vector<double> small = {0.1};
  const auto unrepaired = SearchErrorReport(em, lex, &fst, small);
  EXPECT_TRUE(unrepaired[0].search_error);
  EXPECT_FALSE(unrepaired[0].repair_alpha.has_value());

  const std::string tsv = FormatSearchErrorTsv(rows);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "word\tn_segs\tlogp_sum\tlogp_max\tgap\tflipped_by_alpha");
  EXPECT_NE(tsv.find("\t0.25\n"), std::string::npos);
  EXPECT_NE(tsv.find("ad\t1\t"), std::string::npos);
  EXPECT_NE(FormatSearchErrorTsv(unrepaired).find("\tnone\n"), std::string::npos);
}

TEST(LabTest, SingleSegmentationLexiconHasNoSearchErrors) {
  const auto em = WorkedInstanceModel();
  const std::vector<std::string> words = {"ad", "b", "da"};
  const Lexicon lex(words, em.inventory());
  for (const auto& row : SearchErrorReport(em, lex, nullptr, DefaultAlphaGrid())) {
    EXPECT_EQ(row.n_segs, 1u);
    EXPECT_EQ(row.gap, 0.0);
    EXPECT_FALSE(row.search_error);
  }
}

TEST(LabTest, PosteriorsMatchExhaustiveEnumeration) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const auto lab = MakeRandomLab(rng);
    const Lexicon lex(lab.lexicon, lab.em.inventory());
    const auto paths = ExhaustivePaths(lab.em, lab.lexicon);
    for (const auto& w : lex.words()) {
      const double sum = WordPosteriorSum(lab.em, lex, w);
      const double mx = WordPosteriorMax(lab.em, lex, w);
      auto it = paths.find(w);
      if (it == paths.end()) {
        EXPECT_EQ(sum, kLogZero);
        EXPECT_EQ(mx, kLogZero);
        continue;
      }
      std::vector<double> scores;
      for (const auto& p : it->second) scores.push_back(p.second);
      EXPECT_NEAR(sum, oracle::LogSumExp(scores), 1e-9);
      EXPECT_NEAR(mx, *std::max_element(scores.begin(), scores.end()), 1e-12);
      EXPECT_GE(sum, mx - 1e-12);
    }
  }
}

// With a beam as wide as the search space, the decoder's best word must be
// the exhaustive argmax of emission plus fusion.
TEST(LabTest, WideBeamMatchesExhaustiveOracle) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const auto lab = MakeRandomLab(rng);
    const Lexicon lex(lab.lexicon, lab.em.inventory());
    const auto paths = ExhaustivePaths(lab.em, lab.lexicon);
    if (paths.empty()) continue;
    const FusionLevel level = trial % 2 ? FusionLevel::kWord : FusionLevel::kSubword;
    const std::vector<std::string> band = {lex.words()[0]};
    const auto fst = UnigramFst::Build(band, -1.0, level, &lab.em.inventory());
    const double alpha = 0.5 * static_cast<double>(rng() % 5);
    const OnTheFlyFuser fuser(fst, alpha);
    std::vector<std::string> stored;
    for (const auto& arc : fst.Find(band[0])->path) stored.push_back(arc.unit);

    std::string best_word;
    double best = -INFINITY;
    for (const auto& [word, list] : paths) {
      for (const auto& [units, score] : list) {
        double bonus = 0.0;
        if (word == band[0] && (level == FusionLevel::kWord || units == stored)) bonus = alpha;
        if (score + bonus > best + 1e-12) {
          best = score + bonus;
          best_word = word;
        }
      }
    }
    size_t width = 1;
    for (size_t t = 0; t < lab.em.steps(); ++t) width *= lab.em.num_units();
    const auto out = BeamSearch(lab.em, lex, width, &fuser);
    ASSERT_FALSE(out.hyps.empty());
    EXPECT_NEAR(*out.hyps[0].combined, best, 1e-9);
    EXPECT_NEAR(out.hyps[0].base_logprob + out.hyps[0].usf_logprob, *out.hyps[0].combined, 1e-12);
  }
}

TEST(LabTest, RandomReportsFlagOnlyMultiSegmentWords) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto lab = MakeRandomLab(rng);
    const Lexicon lex(lab.lexicon, lab.em.inventory());
    const auto rows = SearchErrorReport(lab.em, lex, nullptr, DefaultAlphaGrid());
    EXPECT_EQ(rows.size(), lex.words().size());
    for (const auto& r : rows) {
      EXPECT_GE(r.gap, 0.0);
      if (r.search_error) {
        EXPECT_GT(r.gap, 0.0);
        EXPECT_GE(r.n_segs, 2u);
      }
    }
  }
}

TEST(LabTest, LexiconBasics) {
  const auto inv = SubwordInventory::Uniform({"a", "b", "ab"});
  const std::vector<std::string> words = {"ab", "ba", "ab"};
  const Lexicon lex(words, inv);
  EXPECT_EQ(lex.words(), (std::vector<std::string>{"ab", "ba"}));
  EXPECT_TRUE(lex.IsPrefix(""));
  EXPECT_TRUE(lex.IsPrefix("a"));
  EXPECT_FALSE(lex.IsPrefix("bb"));
  EXPECT_TRUE(lex.Contains("ba"));
  EXPECT_FALSE(lex.Contains("b"));
  EXPECT_EQ(lex.segmentations("ab").size(), 2u);
  EXPECT_THROW(Lexicon({}, inv), ArgumentError);
  const std::vector<std::string> bad = {"abc"};
  EXPECT_THROW(Lexicon(bad, inv), SegmentationError);
}

}  // namespace
}  // namespace usf
