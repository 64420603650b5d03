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

#include "usf/segmentation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "usf/error.h"
#include "usf/logmath.h"
#include "usf/text.h"

namespace usf {

SubwordInventory::SubwordInventory(
    std::vector<std::pair<std::string, double>> units) {
  if (units.empty()) throw ArgumentError("empty subword inventory");
  for (auto& [unit, lp] : units) {
    if (!IsValidToken(unit)) throw ArgumentError("invalid unit: '" + unit + "'");
    if (!std::isfinite(lp) || lp > 0.0) {
      throw ArgumentError("unit logprob must be finite and <= 0: " + unit);
    }
    auto [it, inserted] = logprob_.emplace(unit, lp);
    if (!inserted && it->second != lp) {
      throw ArgumentError("conflicting logprob for unit: " + unit);
    }
  }
  for (const auto& [unit, lp] : logprob_) {
    const auto bounds = CodepointBoundaries(unit);
    max_unit_codepoints_ = std::max(max_unit_codepoints_, bounds.size() - 1);
    for (size_t k = 0; k + 1 < bounds.size(); ++k) {
      std::string ch = unit.substr(bounds[k], bounds[k + 1] - bounds[k]);
      if (!logprob_.count(ch)) {
        throw ArgumentError("character '" + ch + "' of unit '" + unit +
                            "' is not itself a unit");
      }
    }
  }
}

SubwordInventory SubwordInventory::Uniform(const std::vector<std::string>& units) {
  if (units.empty()) throw ArgumentError("empty subword inventory");
  std::vector<std::string> uniq(units);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  const double lp = -std::log(static_cast<double>(uniq.size()));
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(uniq.size());
  for (auto& u : uniq) scored.emplace_back(u, lp);
  return SubwordInventory(std::move(scored));
}

bool SubwordInventory::Contains(std::string_view unit) const {
  return logprob_.find(std::string(unit)) != logprob_.end();
}

double SubwordInventory::logprob(std::string_view unit) const {
  auto it = logprob_.find(std::string(unit));
  if (it == logprob_.end()) {
    throw ArgumentError("unit not in inventory: " + std::string(unit));
  }
  return it->second;
}

std::vector<std::string> SubwordInventory::units() const {
  std::vector<std::string> out;
  out.reserve(logprob_.size());
  for (const auto& [unit, lp] : logprob_) out.push_back(unit);
  std::sort(out.begin(), out.end());
  return out;
}

SubwordInventory ParseInventoryTsv(std::string_view text) {
  std::vector<std::pair<std::string, double>> scored;
  std::vector<std::string> bare;
  size_t line_no = 0;
  for (auto& line : SplitFields(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() == 1) {
      bare.push_back(fields[0]);
    } else if (fields.size() == 2) {
      double lp = 0.0;
      if (!ParseDouble(fields[1], &lp)) {
        throw ParseError("logprob is not a finite number", line_no);
      }
      scored.emplace_back(fields[0], lp);
    } else {
      throw ParseError("expected unit<TAB>logprob", line_no);
    }
    if (!scored.empty() && !bare.empty()) {
      throw ParseError("mixed scored and unscored units", line_no);
    }
  }
  try {
    if (!bare.empty()) return SubwordInventory::Uniform(bare);
    return SubwordInventory(std::move(scored));
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), 0);
  }
}

SubwordInventory ReadInventoryTsv(const std::string& path) {
  return ParseInventoryTsv(ReadFile(path));
}

namespace {

using Edge = LatticeEdge;

std::vector<std::vector<Edge>> BuildLattice(std::string_view word,
                                            const SubwordInventory& inv) {
  if (word.empty()) throw SegmentationError("cannot segment an empty word");
  const auto bounds = CodepointBoundaries(word);
  const size_t n = bounds.size() - 1;
  std::vector<std::vector<Edge>> edges(n);
  for (size_t i = 0; i < n; ++i) {
    std::string_view ch = word.substr(bounds[i], bounds[i + 1] - bounds[i]);
    if (!inv.Contains(ch)) {
      throw SegmentationError("character '" + std::string(ch) + "' of word '" +
                              std::string(word) + "' is not in the inventory");
    }
    const size_t last = std::min(n, i + inv.max_unit_codepoints());
    for (size_t j = i + 1; j <= last; ++j) {
      std::string_view piece = word.substr(bounds[i], bounds[j] - bounds[i]);
      if (inv.Contains(piece)) {
        edges[i].push_back({j, std::string(piece), inv.logprob(piece)});
      }
    }
  }
  return edges;
}

// Counts paths from every position to the end, saturating.
std::vector<size_t> SuffixCounts(const std::vector<std::vector<Edge>>& edges) {
  const size_t n = edges.size();
  std::vector<size_t> count(n + 1, 0);
  count[n] = 1;
  for (size_t i = n; i-- > 0;) {
    size_t c = 0;
    for (const auto& e : edges[i]) {
      size_t add = count[e.end];
      c = (c > SIZE_MAX - add) ? SIZE_MAX : c + add;
    }
    count[i] = c;
  }
  return count;
}

bool SegmentationLess(const Segmentation& a, const Segmentation& b) {
  if (a.units.size() != b.units.size()) return a.units.size() < b.units.size();
  return a.units < b.units;
}

}  // namespace

std::vector<std::vector<LatticeEdge>> BuildSegmentLattice(
    std::string_view word, const SubwordInventory& inv) {
  return BuildLattice(word, inv);
}

size_t CountSegmentations(std::string_view word, const SubwordInventory& inv) {
  return SuffixCounts(BuildLattice(word, inv))[0];
}

std::vector<Segmentation> EnumerateSegmentations(std::string_view word,
                                                 const SubwordInventory& inv,
                                                 size_t cap) {
  if (cap < 1) throw ArgumentError("segmentation cap must be >= 1");
  const auto edges = BuildLattice(word, inv);
  const auto count = SuffixCounts(edges);
  if (count[0] > cap) {
    throw OverflowError("word '" + std::string(word) + "' has more than " +
                        std::to_string(cap) + " segmentations");
  }
  // memo[i]: all segmentations of the suffix starting at code point i.
  const size_t n = edges.size();
  std::vector<std::vector<Segmentation>> memo(n + 1);
  memo[n].push_back(Segmentation{});
  for (size_t i = n; i-- > 0;) {
    if (count[i] == 0) continue;
    auto& out = memo[i];
    out.reserve(count[i]);
    for (const auto& e : edges[i]) {
      for (const auto& tail : memo[e.end]) {
        Segmentation seg;
        seg.units.reserve(tail.units.size() + 1);
        seg.units.push_back(e.unit);
        seg.units.insert(seg.units.end(), tail.units.begin(), tail.units.end());
        seg.logprob = e.logprob + tail.logprob;
        out.push_back(std::move(seg));
      }
    }
  }
  std::vector<Segmentation> result = std::move(memo[0]);
  std::sort(result.begin(), result.end(), SegmentationLess);
  return result;
}

Segmentation ViterbiSegmentation(std::string_view word,
                                 const SubwordInventory& inv) {
  const auto edges = BuildLattice(word, inv);
  const size_t n = edges.size();
  // best[j]: best segmentation of the prefix ending at code point j.
  struct Cell {
    bool reached = false;
    Segmentation seg;
  };
  std::vector<Cell> best(n + 1);
  best[0].reached = true;
  for (size_t i = 0; i < n; ++i) {
    if (!best[i].reached) continue;
    for (const auto& e : edges[i]) {
      Segmentation cand;
      cand.logprob = best[i].seg.logprob + e.logprob;
      cand.units = best[i].seg.units;
      cand.units.push_back(e.unit);
      Cell& cell = best[e.end];
      bool better = !cell.reached;
      if (!better) {
        if (cand.logprob != cell.seg.logprob) {
          better = cand.logprob > cell.seg.logprob;
        } else {
          better = SegmentationLess(cand, cell.seg);
        }
      }
      if (better) {
        cell.reached = true;
        cell.seg = std::move(cand);
      }
    }
  }
  if (!best[n].reached) {
    throw SegmentationError("word '" + std::string(word) +
                            "' has no segmentation");
  }
  return best[n].seg;
}

double MarginalLogprob(std::string_view word, const SubwordInventory& inv) {
  const auto edges = BuildLattice(word, inv);
  const size_t n = edges.size();
  std::vector<double> alpha(n + 1, kLogZero);
  alpha[0] = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (alpha[i] == kLogZero) continue;
    for (const auto& e : edges[i]) {
      alpha[e.end] = LogAdd(alpha[e.end], alpha[i] + e.logprob);
    }
  }
  if (alpha[n] == kLogZero) {
    throw SegmentationError("word '" + std::string(word) +
                            "' has no segmentation");
  }
  return alpha[n];
}

}  // namespace usf
