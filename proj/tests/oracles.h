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

// Independent reference implementations used only by the tests. None of
// these call into the library code paths they are compared against.

#ifndef USF_TESTS_ORACLES_H_
#define USF_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace usf::oracle {

// Every way of cutting an ASCII word at its 2^(n-1) split points whose
// pieces all belong to `units`.
inline std::vector<std::vector<std::string>> BruteForceSplits(
    const std::string& word, const std::set<std::string>& units) {
  std::vector<std::vector<std::string>> out;
  const size_t n = word.size();
  if (n == 0) return out;
  const uint64_t masks = uint64_t{1} << (n - 1);
  for (uint64_t mask = 0; mask < masks; ++mask) {
    std::vector<std::string> pieces;
    size_t start = 0;
    for (size_t i = 1; i <= n; ++i) {
      const bool cut = i == n || (mask >> (i - 1) & 1u);
      if (cut) {
        pieces.push_back(word.substr(start, i - start));
        start = i;
      }
    }
    bool ok = true;
    for (const auto& p : pieces) ok = ok && units.count(p) > 0;
    if (ok) out.push_back(std::move(pieces));
  }
  return out;
}

inline double LogSumExp(const std::vector<double>& xs) {
  double hi = -INFINITY;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -INFINITY) return hi;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - hi);
  return hi + std::log(s);
}

// Classic two-row Levenshtein distance.
inline int64_t EditDistance(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
  std::vector<int64_t> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// (log P(y|x) + alpha log P_USF(y)) / |w| + beta log P_NLM(y) + gamma |w|
inline double FusedScore(double base, double usf, double nlm, size_t words, double alpha,
                  double beta, double gamma) {
  const double w = words == 0 ? 1.0 : static_cast<double>(words);
  return (base + alpha * usf) / w + beta * nlm + gamma * static_cast<double>(words);
}

inline std::map<std::string, int64_t> CountTokens(const std::vector<std::string>& lines) {
  std::map<std::string, int64_t> counts;
  for (const auto& line : lines) {
    std::string tok;
    for (char c : line + " ") {
      if (c == ' ' || c == '\t') {
        if (!tok.empty()) ++counts[tok];
        tok.clear();
      } else {
        tok += c;
      }
    }
  }
  return counts;
}

// Calls fn(sequence) for every sequence of length `len` over [0, n).
inline void ForEachSequence(size_t n, size_t len,
                            const std::function<void(const std::vector<size_t>&)>& fn) {
  std::vector<size_t> seq(len, 0);
  while (true) {
    fn(seq);
    size_t k = len;
    while (k > 0) {
      --k;
      if (++seq[k] < n) break;
      seq[k] = 0;
      if (k == 0) return;
    }
    if (len == 0) return;
  }
}

inline std::vector<double> RandomLogRow(std::mt19937_64& rng, size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> p(n);
  double z = 0.0;
  for (auto& x : p) z += (x = u(rng));
  for (auto& x : p) x = std::log(x / z);
  return p;
}

}  // namespace usf::oracle

#endif  // USF_TESTS_ORACLES_H_
