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

#ifndef USF_DEMO_H_
#define USF_DEMO_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "usf/eval.h"
#include "usf/fusion.h"
#include "usf/lab.h"

namespace usf {

// Seeded synthetic data so every pipeline stage can run offline.
//
// The test n-best lists plant four kinds of utterances:
//   rare_fixable    reference holds a banded rare word, the 1-best swaps it
//                   for a common word; the correct hypothesis trails by a
//                   margin drawn from [0.05, 1.3];
//   rare_distractor reference holds a word that is rare in the test set
//                   but frequent in training; a competitor swaps one common
//                   word for a banded word and trails by [1.05, 1.9];
//   rare_singleton  reference holds a training singleton; a competitor
//                   replaces it with a common word, trailing by [0.05, 0.7];
//   general         only common words; optionally a banded distractor
//                   trailing by [1.05, 1.9].
// About a quarter of utterances also carry an error shared by every
// hypothesis, so oracle WER stays above zero.
struct DemoConfig {
  uint64_t seed = 20210601;
  size_t common_words = 40;
  size_t rare_fixable = 150;
  size_t rare_distractor = 60;
  size_t rare_singleton = 40;
  size_t general_clean = 250;
  size_t general_distractor = 60;
  size_t nbest_size = 16;
  // Extra training-only vocabulary that fills out the count bands.
  size_t filler_types = 1000;
  size_t filler_singletons = 2000;
};

struct DemoData {
  std::vector<std::string> corpus;  // training transcripts
  std::vector<TestUtterance> testset;
  std::vector<NBestList> nbest;
  // Subword inventory over the demo alphabet, as TSV rows.
  std::vector<std::pair<std::string, double>> inventory;
  EmissionModel lab_model;
  std::vector<std::string> lab_lexicon;
};

DemoData GenerateDemo(const DemoConfig& config = {});

// Writes corpus.txt, testset.tsv, nbest.jsonl, inventory.tsv,
// lab_model.json and lab_lexicon.txt into `dir` (created if missing).
void WriteDemo(const DemoData& data, const std::string& dir);

// Two-step model over units {a, b, d, ab, </s>} in which "ab" has
// segmentations [ab] and [a b] with probabilities proportional to 0.4 and
// 0.25, and "ad" has the single segmentation [a d] proportional to 0.45.
// The common factor is 0.44325 because the three numbers sum past 1.
EmissionModel WorkedInstanceModel();
std::vector<std::string> WorkedInstanceLexicon();
inline constexpr double kWorkedInstanceScale = 0.4925 * 0.9;

}  // namespace usf

#endif  // USF_DEMO_H_
