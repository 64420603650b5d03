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

#include "usf/lm.h"

#include <cmath>

#include "usf/error.h"
#include "usf/text.h"

namespace usf {

LmScoreSource LmScoreSource::FileAttached() { return LmScoreSource(); }

LmScoreSource LmScoreSource::TrainNgram(
    const std::vector<std::string>& corpus_lines, int order, double k) {
  if (order != 1 && order != 2) {
    throw ArgumentError("builtin n-gram order must be 1 or 2");
  }
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ArgumentError("add-k constant must be a positive finite number");
  }
  LmScoreSource lm;
  lm.kind_ = Kind::kBuiltinNgram;
  lm.order_ = order;
  lm.k_ = k;
  for (const auto& line : corpus_lines) {
    auto tokens = SplitWhitespace(NormalizeNfc(line));
    std::string history = kSentenceStart;
    for (auto& tok : tokens) {
      ++lm.vocab_[tok];
      ++lm.total_tokens_;
      if (order == 2) {
        ++lm.history_counts_[history];
        ++lm.bigram_counts_[history + '\t' + tok];
      }
      history = std::move(tok);
    }
  }
  if (lm.vocab_.empty()) throw ArgumentError("n-gram training corpus is empty");
  return lm;
}

double LmScoreSource::ConditionalLogprob(const std::string& history,
                                         const std::string& word) const {
  const double v = static_cast<double>(vocab_.size());
  if (order_ == 1) {
    auto it = vocab_.find(word);
    const double c = it == vocab_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((c + k_) / (static_cast<double>(total_tokens_) + k_ * v));
  }
  auto h = history_counts_.find(history);
  const double ch = h == history_counts_.end() ? 0.0 : static_cast<double>(h->second);
  auto b = bigram_counts_.find(history + '\t' + word);
  const double cb = b == bigram_counts_.end() ? 0.0 : static_cast<double>(b->second);
  return std::log((cb + k_) / (ch + k_ * v));
}

double LmScoreSource::Score(std::span<const std::string> words) const {
  if (kind_ != Kind::kBuiltinNgram) {
    throw ConfigError("file-attached LM scores cannot be computed in-process");
  }
  double total = 0.0;
  std::string history = kSentenceStart;
  for (const auto& w : words) {
    total += ConditionalLogprob(history, w);
    history = w;
  }
  return total;
}

}  // namespace usf
