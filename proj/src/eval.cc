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

#include "usf/eval.h"

#include <omp.h>

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "usf/error.h"
#include "usf/parallel.h"
#include "usf/text.h"

namespace usf {

double WerReport::wer() const {
  if (ref_tokens <= 0) throw ArgumentError("WER undefined for an empty reference");
  return static_cast<double>(errors()) / static_cast<double>(ref_tokens);
}

WerReport& WerReport::operator+=(const WerReport& other) {
  substitutions += other.substitutions;
  deletions += other.deletions;
  insertions += other.insertions;
  ref_tokens += other.ref_tokens;
  return *this;
}

WerReport AlignCounts(std::span<const std::string> ref,
                      std::span<const std::string> hyp) {
  const size_t n = ref.size();
  const size_t m = hyp.size();
  const size_t w = m + 1;
  std::vector<int64_t> cost((n + 1) * w);
  for (size_t j = 0; j <= m; ++j) cost[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    cost[i * w] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int64_t diag = cost[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int64_t ins = cost[i * w + j - 1] + 1;
      const int64_t del = cost[(i - 1) * w + j] + 1;
      cost[i * w + j] = std::min({diag, ins, del});
    }
  }
  WerReport r;
  r.ref_tokens = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int64_t here = cost[i * w + j];
    if (i > 0 && j > 0) {
      const bool match = ref[i - 1] == hyp[j - 1];
      if (cost[(i - 1) * w + j - 1] + (match ? 0 : 1) == here) {
        if (!match) ++r.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && cost[i * w + j - 1] + 1 == here) {
      ++r.insertions;
      --j;
      continue;
    }
    ++r.deletions;
    --i;
  }
  return r;
}

WerReport AlignWer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw ArgumentError("WER undefined for an empty reference");
  return AlignCounts(ref, hyp);
}

namespace {

const std::vector<std::string>& RefWords(const NBestList& nb,
                                         std::vector<std::string>& storage) {
  if (!nb.reference) {
    throw ArgumentError("utterance '" + nb.utt_id + "' has no reference");
  }
  storage = SplitWhitespace(*nb.reference);
  return storage;
}

WerReport OracleOne(const NBestList& nb, size_t depth) {
  if (nb.hyps.empty()) {
    throw ArgumentError("utterance '" + nb.utt_id + "' has no hypotheses");
  }
  std::vector<std::string> storage;
  const auto& ref = RefWords(nb, storage);
  const size_t limit = std::min(depth, nb.hyps.size());
  WerReport best = AlignCounts(ref, nb.hyps[0].words);
  for (size_t k = 1; k < limit; ++k) {
    WerReport r = AlignCounts(ref, nb.hyps[k].words);
    if (r.errors() < best.errors()) best = r;
  }
  return best;
}

WerReport TopOne(const NBestList& nb) {
  if (nb.hyps.empty()) {
    throw ArgumentError("utterance '" + nb.utt_id + "' has no hypotheses");
  }
  std::vector<std::string> storage;
  return AlignCounts(RefWords(nb, storage), nb.hyps[0].words);
}

// Per-item counts in parallel, pooled in index order.
template <typename Fn>
WerReport PooledParallel(size_t count, Fn fn) {
  const int jobs = Jobs();
  std::vector<WerReport> parts(count);
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 32) if (jobs > 1 && n >= 256)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<size_t>(i);
    try {
      parts[idx] = fn(idx);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  WerReport total;
  for (size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    total += parts[i];
  }
  return total;
}

}  // namespace

namespace serial {

WerReport CorpusWer(std::span<const RefHyp> data) {
  WerReport total;
  for (const auto& rh : data) total += AlignCounts(rh.ref, rh.hyp);
  return total;
}

WerReport TopOneWer(std::span<const NBestList> data) {
  WerReport total;
  for (const auto& nb : data) total += TopOne(nb);
  return total;
}

WerReport OracleWer(std::span<const NBestList> data, size_t depth) {
  WerReport total;
  for (const auto& nb : data) total += OracleOne(nb, depth);
  return total;
}

}  // namespace serial

WerReport CorpusWer(std::span<const RefHyp> data) {
  return PooledParallel(data.size(),
                        [&](size_t i) { return AlignCounts(data[i].ref, data[i].hyp); });
}

WerReport TopOneWer(std::span<const NBestList> data) {
  return PooledParallel(data.size(), [&](size_t i) { return TopOne(data[i]); });
}

WerReport OracleWer(std::span<const NBestList> data, size_t depth) {
  return PooledParallel(data.size(), [&](size_t i) { return OracleOne(data[i], depth); });
}

double Werr(const WerReport& baseline, const WerReport& system) {
  const double b = baseline.wer();
  if (b <= 0.0) throw ArgumentError("WERR undefined for a zero baseline WER");
  return (b - system.wer()) / b;
}

std::vector<TestUtterance> ExtractRareTestset(std::span<const TestUtterance> testset,
                                             int64_t threshold) {
  std::unordered_map<std::string, int64_t> counts;
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(testset.size());
  for (const auto& u : testset) {
    tokens.push_back(SplitWhitespace(u.reference));
    for (const auto& w : tokens.back()) ++counts[w];
  }
  std::vector<TestUtterance> out;
  for (size_t i = 0; i < testset.size(); ++i) {
    const bool rare = std::any_of(tokens[i].begin(), tokens[i].end(),
                                  [&](const std::string& w) { return counts[w] < threshold; });
    if (rare) out.push_back(testset[i]);
  }
  return out;
}

std::vector<TestUtterance> ParseTestsetTsv(std::string_view text) {
  std::vector<TestUtterance> out;
  std::unordered_set<std::string> ids;
  size_t line_no = 0;
  for (auto& line : SplitFields(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError("expected utt_id<TAB>reference", line_no);
    }
    if (!ids.insert(fields[0]).second) {
      throw ParseError("duplicate utt_id '" + fields[0] + "'", line_no);
    }
    out.push_back({fields[0], Join(SplitWhitespace(NormalizeNfc(fields[1])), " ")});
  }
  return out;
}

std::vector<TestUtterance> ReadTestsetTsv(const std::string& path) {
  return ParseTestsetTsv(ReadFile(path));
}

std::string FormatTestsetTsv(std::span<const TestUtterance> testset) {
  std::string out;
  for (const auto& u : testset) {
    out += u.utt_id;
    out += '\t';
    out += u.reference;
    out += '\n';
  }
  return out;
}

}  // namespace usf
