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

#include "usf/vocab.h"

#include <omp.h>

#include <algorithm>

#include "usf/error.h"
#include "usf/parallel.h"
#include "usf/text.h"

namespace usf {

void VocabCounts::Add(const std::string& word, int64_t count) {
  if (count <= 0) throw ArgumentError("count must be positive for: " + word);
  counts_[word] += count;
  total_tokens_ += count;
}

void VocabCounts::Merge(const VocabCounts& other) {
  for (const auto& [word, count] : other.counts_) counts_[word] += count;
  total_tokens_ += other.total_tokens_;
}

int64_t VocabCounts::count(const std::string& word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, int64_t>> VocabCounts::Sorted() const {
  std::vector<std::pair<std::string, int64_t>> out(counts_.begin(),
                                                   counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::string NormalizeToken(std::string_view token, const CountOptions& opts) {
  std::string out = NormalizeNfc(token);
  if (opts.lowercase) out = Lowercase(out);
  return out;
}

namespace {

void CountLine(const std::string& line, const CountOptions& opts,
               VocabCounts* counts) {
  // NFC over the whole line, so a combining mark after a space stays put.
  std::string normalized = NormalizeNfc(line);
  if (opts.lowercase) normalized = Lowercase(normalized);
  for (auto& tok : SplitWhitespace(normalized)) counts->Add(tok);
}

}  // namespace

namespace serial {

VocabCounts CountUnigrams(const std::vector<std::string>& lines,
                          const CountOptions& opts) {
  VocabCounts counts;
  for (const auto& line : lines) CountLine(line, opts, &counts);
  return counts;
}

}  // namespace serial

VocabCounts CountUnigrams(const std::vector<std::string>& lines,
                          const CountOptions& opts) {
  const int jobs = Jobs();
  if (jobs <= 1 || lines.size() < 1024) return serial::CountUnigrams(lines, opts);

  std::vector<VocabCounts> shards(static_cast<size_t>(jobs));
  const long long n = static_cast<long long>(lines.size());
#pragma omp parallel num_threads(jobs)
  {
    VocabCounts& local = shards[static_cast<size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (long long i = 0; i < n; ++i) {
      CountLine(lines[static_cast<size_t>(i)], opts, &local);
    }
  }
  VocabCounts total;
  for (const auto& shard : shards) total.Merge(shard);
  return total;
}

VocabCounts CountUnigramsFile(const std::string& path,
                              const CountOptions& opts) {
  return CountUnigrams(ReadLines(path), opts);
}

std::set<std::string> SelectBand(const VocabCounts& counts, int64_t n_thresh,
                                 bool include_all_above_one) {
  if (!include_all_above_one && n_thresh < 2) {
    throw ArgumentError("n_thresh must be >= 2 (got " +
                        std::to_string(n_thresh) + ")");
  }
  std::set<std::string> band;
  for (const auto& [word, count] : counts.counts()) {
    if (count < 2) continue;
    if (include_all_above_one || count <= n_thresh) band.insert(word);
  }
  return band;
}

std::string FormatCountsTsv(const VocabCounts& counts) {
  std::string out;
  for (const auto& [word, count] : counts.Sorted()) {
    out.append(word);
    out.push_back('\t');
    out.append(std::to_string(count));
    out.push_back('\n');
  }
  return out;
}

VocabCounts ParseCountsTsv(std::string_view text) {
  VocabCounts counts;
  size_t line_no = 0;
  for (auto& line : SplitFields(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 2) {
      throw ParseError("expected word<TAB>count", line_no);
    }
    long long c = 0;
    if (!IsValidToken(fields[0])) throw ParseError("invalid word", line_no);
    if (!ParseInt64(fields[1], &c) || c <= 0) {
      throw ParseError("count must be a positive integer", line_no);
    }
    if (counts.count(fields[0]) != 0) {
      throw ParseError("duplicate word: " + fields[0], line_no);
    }
    counts.Add(fields[0], c);
  }
  return counts;
}

VocabCounts ReadCountsTsv(const std::string& path) {
  return ParseCountsTsv(ReadFile(path));
}

}  // namespace usf
