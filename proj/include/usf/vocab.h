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

#ifndef USF_VOCAB_H_
#define USF_VOCAB_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace usf {

// Unigram counts over a training corpus.
class VocabCounts {
 public:
  VocabCounts() = default;

  void Add(const std::string& word, int64_t count = 1);
  // Commutative and associative; used to combine per-shard counts.
  void Merge(const VocabCounts& other);

  int64_t count(const std::string& word) const;
  int64_t total_tokens() const { return total_tokens_; }
  size_t total_types() const { return counts_.size(); }
  const std::unordered_map<std::string, int64_t>& counts() const {
    return counts_;
  }

  // Descending count, then byte-wise word order.
  std::vector<std::pair<std::string, int64_t>> Sorted() const;

  bool operator==(const VocabCounts& other) const {
    return total_tokens_ == other.total_tokens_ && counts_ == other.counts_;
  }

 private:
  std::unordered_map<std::string, int64_t> counts_;
  int64_t total_tokens_ = 0;
};

struct CountOptions {
  bool lowercase = false;
};

// Token normalization applied at ingestion: NFC, then optional lowercase.
std::string NormalizeToken(std::string_view token, const CountOptions& opts);

// Whitespace-tokenizes each line after normalization and counts tokens.
// Lines are sharded across Jobs() workers and the shard maps merged.
VocabCounts CountUnigrams(const std::vector<std::string>& lines,
                          const CountOptions& opts = {});

// Reads a UTF-8 corpus file, one utterance per line.
VocabCounts CountUnigramsFile(const std::string& path,
                              const CountOptions& opts = {});

namespace serial {
// Single-threaded reference for CountUnigrams.
VocabCounts CountUnigrams(const std::vector<std::string>& lines,
                          const CountOptions& opts = {});
}  // namespace serial

// Words with 2 <= count <= n_thresh, or every word with count >= 2 when
// `include_all_above_one` is set (n_thresh is then ignored).
std::set<std::string> SelectBand(const VocabCounts& counts, int64_t n_thresh,
                                 bool include_all_above_one = false);

// TSV `word<TAB>count`, sorted as Sorted().
std::string FormatCountsTsv(const VocabCounts& counts);
VocabCounts ParseCountsTsv(std::string_view text);
VocabCounts ReadCountsTsv(const std::string& path);

}  // namespace usf

#endif  // USF_VOCAB_H_
