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

#ifndef USF_EVAL_H_
#define USF_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usf/fusion.h"

namespace usf {

struct WerReport {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t ref_tokens = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
  // Throws ArgumentError when ref_tokens == 0.
  double wer() const;

  WerReport& operator+=(const WerReport& other);
  bool operator==(const WerReport&) const = default;
};

// Minimum edit distance alignment with unit costs. On equal cost the
// backtrace prefers substitution (or match), then insertion, then deletion.
// Throws ArgumentError for an empty reference.
WerReport AlignWer(std::span<const std::string> ref, std::span<const std::string> hyp);

// Same alignment; an empty reference is allowed and yields only insertions.
WerReport AlignCounts(std::span<const std::string> ref,
                      std::span<const std::string> hyp);

struct RefHyp {
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
};

// Pooled counts over all utterances (not a mean of per-utterance WERs).
WerReport CorpusWer(std::span<const RefHyp> data);

// Top-1 WER of rescored lists. Every list needs a reference.
WerReport TopOneWer(std::span<const NBestList> data);

// Per utterance, the hypothesis among the first `depth` with the fewest
// edit errors; ties go to the higher-ranked one.
WerReport OracleWer(std::span<const NBestList> data, size_t depth = SIZE_MAX);

namespace serial {
WerReport CorpusWer(std::span<const RefHyp> data);
WerReport TopOneWer(std::span<const NBestList> data);
WerReport OracleWer(std::span<const NBestList> data, size_t depth = SIZE_MAX);
}  // namespace serial

// (baseline - system) / baseline; positive means improvement.
double Werr(const WerReport& baseline, const WerReport& system);

struct TestUtterance {
  std::string utt_id;
  std::string reference;
};

inline constexpr int64_t kRareTestCount = 4;

// Utterances containing at least one word seen fewer than `threshold`
// times across all references of `testset`. Preserves input order.
std::vector<TestUtterance> ExtractRareTestset(std::span<const TestUtterance> testset,
                                             int64_t threshold = kRareTestCount);

// TSV `utt_id<TAB>reference`.
std::vector<TestUtterance> ParseTestsetTsv(std::string_view text);
std::vector<TestUtterance> ReadTestsetTsv(const std::string& path);
std::string FormatTestsetTsv(std::span<const TestUtterance> testset);

}  // namespace usf

#endif  // USF_EVAL_H_
