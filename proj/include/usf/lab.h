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

#ifndef USF_LAB_H_
#define USF_LAB_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "usf/fst.h"
#include "usf/fusion.h"
#include "usf/segmentation.h"

namespace usf {

inline constexpr std::string_view kDefaultEndUnit = "</s>";

// Position-factorized emission scores: table[t][u] is the log-probability
// of emitting unit u at step t. Rows are normalized. A designated end unit
// pads sequences shorter than `steps`.
class EmissionModel {
 public:
  // `log_table` is row-major, steps x units.size(). The end unit must be
  // one of `units`; the others form the segmentation inventory and are
  // scored log-uniformly there.
  EmissionModel(std::vector<std::string> units, size_t steps,
                std::vector<double> log_table,
                std::string end_unit = std::string(kDefaultEndUnit));

  size_t steps() const { return steps_; }
  size_t num_units() const { return units_.size(); }
  const std::vector<std::string>& units() const { return units_; }
  const std::string& end_unit() const { return units_[end_]; }
  size_t end_index() const { return end_; }
  // -1 when `unit` is unknown.
  int UnitIndex(std::string_view unit) const;

  double log_prob(size_t step, size_t unit) const {
    return table_[step * units_.size() + unit];
  }
  const std::vector<double>& log_table() const { return table_; }
  const SubwordInventory& inventory() const { return inventory_; }

 private:
  std::vector<std::string> units_;
  size_t steps_;
  std::vector<double> table_;
  size_t end_ = 0;
  std::unordered_map<std::string, int> index_;
  SubwordInventory inventory_;
};

// {"steps": T, "units": [...], "log_table": [...], "end_unit": "</s>"}.
// log_table is either flat row-major or a list of rows; end_unit is
// optional.
EmissionModel ParseEmissionModelJson(std::string_view text);
EmissionModel ReadEmissionModel(const std::string& path);
std::string FormatEmissionModelJson(const EmissionModel& em);

// Words with their complete segmentation sets.
class Lexicon {
 public:
  Lexicon(std::span<const std::string> words, const SubwordInventory& inv,
          size_t cap = kDefaultSegmentationCap);

  // Byte-wise sorted, unique.
  const std::vector<std::string>& words() const { return words_; }
  bool Contains(std::string_view word) const;
  bool IsPrefix(std::string_view text) const;
  // Throws ArgumentError for words outside the lexicon.
  const std::vector<Segmentation>& segmentations(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<Segmentation>> segs_;
  std::unordered_set<std::string> prefixes_;
};

// One word per line; blank lines ignored.
std::vector<std::string> ReadLexiconWords(const std::string& path);

// Sum of table[i][unit_i], padded to `steps` with the end unit.
double SeqLogprob(const EmissionModel& em, std::span<const std::string> units);

// log sum over every segmentation of `word` of SeqLogprob. Segmentations
// longer than the model's step count have zero probability.
double WordPosteriorSum(const EmissionModel& em, const Lexicon& lex,
                        std::string_view word);
// Same with max in place of the sum.
double WordPosteriorMax(const EmissionModel& em, const Lexicon& lex,
                        std::string_view word);

// Max-decoding beam search over unit extensions constrained to lexicon
// prefixes. With a fuser, its deltas are added to the running score.
// Returns one hypothesis per reachable word (the best of its
// segmentations), sorted by score with ties by word. base_logprob holds
// the emission score, usf_logprob the fused reward in log units (alpha
// applied) and combined their sum.
NBestList BeamSearch(const EmissionModel& em, const Lexicon& lex,
                     size_t beam_width, const OnTheFlyFuser* fuser = nullptr);

// Argmax over lexicon words; ties go to the byte-wise smaller word.
std::string SumDecision(const EmissionModel& em, const Lexicon& lex);
std::string MaxDecision(const EmissionModel& em, const Lexicon& lex);

struct SearchErrorRow {
  std::string word;
  size_t n_segs = 0;
  double logp_sum = 0.0;
  double logp_max = 0.0;
  double gap = 0.0;
  // The word wins under summed posteriors but not under max decoding.
  bool search_error = false;
  // Smallest grid alpha for which max decoding with USF picks the word.
  std::optional<double> repair_alpha;
};

inline const std::vector<double>& DefaultAlphaGrid() {
  static const std::vector<double> grid = {0.25, 0.5, 0.75, 1.0, 2.0};
  return grid;
}

// One row per lexicon word, in lexicon order. `fst` may be null, in which
// case no error can be repaired.
std::vector<SearchErrorRow> SearchErrorReport(const EmissionModel& em,
                                              const Lexicon& lex,
                                              const UnigramFst* fst,
                                              std::span<const double> alpha_grid);

namespace serial {
std::vector<SearchErrorRow> SearchErrorReport(const EmissionModel& em,
                                              const Lexicon& lex,
                                              const UnigramFst* fst,
                                              std::span<const double> alpha_grid);
}  // namespace serial

// TSV with header: word n_segs logp_sum logp_max gap flipped_by_alpha.
// flipped_by_alpha is "-" for words without a search error and "none" when
// no grid alpha repairs one.
std::string FormatSearchErrorTsv(const std::vector<SearchErrorRow>& rows);

}  // namespace usf

#endif  // USF_LAB_H_
