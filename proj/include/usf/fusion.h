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

#ifndef USF_FUSION_H_
#define USF_FUSION_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usf/fst.h"
#include "usf/lm.h"

namespace usf {

// U+2581, the leading word-boundary marker on subword units.
inline constexpr std::string_view kDefaultBoundaryMarker = "\xE2\x96\x81";

inline constexpr double kDefaultAlpha = 0.75;
inline constexpr long long kDefaultNThresh = 250;

struct Hypothesis {
  std::vector<std::string> words;
  // Subword units with a leading boundary marker on each word-initial unit.
  std::optional<std::vector<std::string>> subwords;
  double base_logprob = 0.0;  // first-pass log P(y|x)
  std::optional<double> nlm_logprob;
  // Cached by CombinedScore.
  double usf_logprob = 0.0;
  std::optional<double> combined;

  size_t word_count() const { return words.size(); }
  std::string text() const;
};

struct NBestList {
  std::string utt_id;
  std::optional<std::string> reference;
  std::vector<Hypothesis> hyps;
};

enum class UsfStage { kOnTheFly, kSecondPass };

const char* ToString(UsfStage stage);
UsfStage ParseUsfStage(std::string_view text);

struct FusionParams {
  double alpha = kDefaultAlpha;
  double beta = 0.0;
  double gamma = 0.0;
  FusionLevel level = FusionLevel::kWord;
  UsfStage usf_stage = UsfStage::kOnTheFly;
  std::string boundary_marker{kDefaultBoundaryMarker};

  // alpha, beta finite and >= 0; gamma finite; marker non-empty.
  void Validate() const;
};

// Groups marker-delimited subword units into per-word unit lists, with the
// marker removed. Empty pieces (a bare marker) are dropped; a leading unit
// without a marker still opens the first word.
std::vector<std::vector<std::string>> GroupSubwords(
    std::span<const std::string> subwords, std::string_view marker);

// log P_USF(y) as a second-pass score. Word level sums Lookup over the
// words. Subword level rewards a word only when its units in the
// hypothesis follow the FST's stored path for that word exactly.
double UsfLogprob(const Hypothesis& h, const UnigramFst& fst,
                  std::string_view marker = kDefaultBoundaryMarker);

// (base + alpha * usf) / max(1, |w|) + beta * nlm + gamma * |w|.
//
// `fst` may be null, meaning no USF term. With a file-attached LM and
// beta != 0 every hypothesis must carry nlm_logprob. Writes usf_logprob and
// combined into `h`.
double CombinedScore(Hypothesis& h, const FusionParams& p,
                     const UnigramFst* fst, const LmScoreSource& lm);

// Returns a copy sorted by CombinedScore, descending; equal scores keep
// their input order.
NBestList RescoreNbest(const NBestList& nb, const FusionParams& p,
                       const UnigramFst* fst, const LmScoreSource& lm);

// RescoreNbest over every utterance, parallel across Jobs() workers.
std::vector<NBestList> RescoreDataset(std::span<const NBestList> data,
                                      const FusionParams& p,
                                      const UnigramFst* fst,
                                      const LmScoreSource& lm);

namespace serial {
std::vector<NBestList> RescoreDataset(std::span<const NBestList> data,
                                      const FusionParams& p,
                                      const UnigramFst* fst,
                                      const LmScoreSource& lm);
}  // namespace serial

// Incremental USF scoring for a beam-search decoder.
//
// Word level: each Advance() consumes a whole word and returns
// alpha * reward. Subword level: units follow the FST's prefix trie and
// each step returns the change in reachable reward (for an isolated word,
// its evenly spread per-unit share). A word that leaves the trie, or ends
// short of a stored word, gets back a delta cancelling what it earned.
// Over a complete hypothesis the deltas sum to alpha * UsfLogprob().
class OnTheFlyFuser {
 public:
  struct State {
    int node = 0;
    bool in_word = false;
    bool failed = false;
    double earned = 0.0;  // unscaled reward credited to the open word
  };

  OnTheFlyFuser(const UnigramFst& fst, double alpha,
                std::string marker = std::string(kDefaultBoundaryMarker));

  FusionLevel level() const { return fst_->level(); }

  double Advance(State& state, std::string_view unit) const;
  // Closes the last open word. Call once at hypothesis end.
  double Finish(State& state) const;

 private:
  double CloseWord(State& state) const;

  const UnigramFst* fst_;
  double alpha_;
  std::string marker_;
};

}  // namespace usf

#endif  // USF_FUSION_H_
