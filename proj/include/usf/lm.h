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

#ifndef USF_LM_H_
#define USF_LM_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace usf {

// Where the second-pass LM term comes from: either scores attached to each
// hypothesis in the n-best file, or a small add-k n-gram model trained
// in-process as a stand-in for a neural LM.
class LmScoreSource {
 public:
  enum class Kind { kFileAttached, kBuiltinNgram };

  static LmScoreSource FileAttached();

  // order is 1 or 2; k > 0. The vocabulary is the set of corpus tokens.
  // Lines are whitespace-tokenized after NFC normalization.
  static LmScoreSource TrainNgram(const std::vector<std::string>& corpus_lines,
                                  int order, double k);

  Kind kind() const { return kind_; }
  int order() const { return order_; }
  double k() const { return k_; }
  size_t vocab_size() const { return vocab_.size(); }

  // Add-k smoothed log-probability of `word` after `history` (ignored for
  // unigram order; "<s>" marks the sentence start). Words outside the
  // vocabulary are scored as unseen in-vocabulary words, so the result is
  // always finite.
  double ConditionalLogprob(const std::string& history,
                            const std::string& word) const;

  // Sum of conditional log-probabilities; 0 for an empty sequence.
  // Only valid for kBuiltinNgram.
  double Score(std::span<const std::string> words) const;

 private:
  LmScoreSource() = default;

  Kind kind_ = Kind::kFileAttached;
  int order_ = 1;
  double k_ = 1.0;
  std::unordered_map<std::string, int64_t> vocab_;
  int64_t total_tokens_ = 0;
  // history -> number of bigrams starting with it
  std::unordered_map<std::string, int64_t> history_counts_;
  // "history\tword" -> count
  std::unordered_map<std::string, int64_t> bigram_counts_;
};

inline constexpr const char* kSentenceStart = "<s>";

}  // namespace usf

#endif  // USF_LM_H_
