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

#ifndef USF_SWEEP_H_
#define USF_SWEEP_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usf/eval.h"
#include "usf/fst.h"
#include "usf/fusion.h"
#include "usf/lm.h"
#include "usf/segmentation.h"
#include "usf/vocab.h"

namespace usf {

enum class SweepParam { kAlpha, kNThresh, kLevel };

const char* ToString(SweepParam p);
SweepParam ParseSweepParam(std::string_view text);

inline constexpr size_t kDefaultOracleDepth = 8;

struct SweepConfig {
  // alpha, beta, gamma, level for cells that do not override them.
  FusionParams params;
  long long n_thresh = kDefaultNThresh;
  // Use every word with training count >= 2 instead of the band.
  bool include_all = false;
  double arc_weight = -1.0;
  // Oracle WER looks at the first `oracle_depth` hypotheses after
  // rescoring, like an n-best beam of that size.
  size_t oracle_depth = kDefaultOracleDepth;
  // Needed for subword-level cells.
  const SubwordInventory* inventory = nullptr;
};

struct SweepCell {
  std::string label;
  WerReport top1_rare, oracle_rare, top1_gen, oracle_gen;
  double werr_rare = 0.0;
  double oracle_werr_rare = 0.0;
  double werr_gen = 0.0;
  double oracle_werr_gen = 0.0;
};

struct SweepResult {
  SweepParam param = SweepParam::kAlpha;
  SweepCell baseline;  // no USF; all WERRs are 0
  std::vector<SweepCell> cells;
  size_t rare_utterances = 0;
  size_t gen_utterances = 0;
};

// Every list in `data` needs a reference. The general test set is all of
// `data`; the rare subset is selected from the same references with
// ExtractRareTestset. `train_counts` drives band selection. Grid values
// are alpha values, n_thresh values (or "all"), or "word"/"subword".
SweepResult RunSweep(std::span<const NBestList> data, const VocabCounts& train_counts,
                     const LmScoreSource& lm, SweepParam param,
                     const std::vector<std::string>& grid, const SweepConfig& config);

// One evaluation cell with explicit settings; `fst` may be null.
SweepCell EvaluateCell(std::span<const NBestList> gen, std::span<const NBestList> rare,
                       const FusionParams& params, const UnigramFst* fst,
                       const LmScoreSource& lm, size_t oracle_depth);

// TSV with header `param werr_rare oracle_werr_rare werr_gen oracle_werr_gen`,
// fractions with six decimals, baseline row first.
std::string FormatSweepTsv(const SweepResult& result);

// Fixed-width text table: WERR with oracle WERR in parentheses, percent.
std::string FormatSweepTable(const SweepResult& result);

// Keeps the lists whose utt_id is in `subset`, in `data` order.
std::vector<NBestList> FilterByIds(std::span<const NBestList> data,
                                   std::span<const TestUtterance> subset);

}  // namespace usf

#endif  // USF_SWEEP_H_
