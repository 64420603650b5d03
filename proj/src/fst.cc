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

#include "usf/fst.h"

#include <algorithm>
#include <cmath>

#include "usf/error.h"
#include "usf/text.h"

namespace usf {

namespace {

constexpr std::string_view kHeaderPrefix = "#usf-fst v1 level=";

}  // namespace

const char* ToString(FusionLevel level) {
  return level == FusionLevel::kWord ? "word" : "subword";
}

FusionLevel ParseFusionLevel(std::string_view text) {
  if (text == "word") return FusionLevel::kWord;
  if (text == "subword") return FusionLevel::kSubword;
  throw ArgumentError("unknown fusion level: " + std::string(text));
}

std::vector<SubwordArc> DistributeWeight(const std::vector<std::string>& units,
                                         double arc_weight) {
  std::vector<SubwordArc> path;
  if (units.empty()) return path;
  const double share = arc_weight / static_cast<double>(units.size());
  double used = 0.0;
  for (size_t i = 0; i < units.size(); ++i) {
    const double w = (i + 1 == units.size()) ? arc_weight - used : share;
    path.push_back({units[i], w});
    used += w;
  }
  return path;
}

UnigramFst UnigramFst::Build(std::span<const std::string> words,
                             double arc_weight, FusionLevel level,
                             const SubwordInventory* inventory) {
  if (words.empty()) throw ArgumentError("empty vocabulary");
  if (!std::isfinite(arc_weight)) throw ArgumentError("arc weight must be finite");
  if (level == FusionLevel::kSubword && inventory == nullptr) {
    throw ConfigError("subword-level FST requires a subword inventory");
  }
  std::vector<std::pair<std::string, FstEntry>> entries;
  entries.reserve(words.size());
  for (const auto& raw : words) {
    std::string word = NormalizeNfc(raw);
    FstEntry entry;
    entry.arc_weight = arc_weight;
    if (level == FusionLevel::kSubword) {
      if (!IsValidToken(word)) throw ArgumentError("invalid word: '" + word + "'");
      Segmentation seg = ViterbiSegmentation(word, *inventory);
      entry.path = DistributeWeight(seg.units, arc_weight);
    }
    entries.emplace_back(std::move(word), std::move(entry));
  }
  return FromEntries(level, std::move(entries));
}

UnigramFst UnigramFst::FromEntries(
    FusionLevel level, std::vector<std::pair<std::string, FstEntry>> entries) {
  if (entries.empty()) throw ArgumentError("empty vocabulary");
  UnigramFst fst;
  fst.level_ = level;
  for (auto& [word, entry] : entries) {
    if (!IsValidToken(word)) throw ArgumentError("invalid word: '" + word + "'");
    if (!std::isfinite(entry.arc_weight)) {
      throw ArgumentError("non-finite weight for word: " + word);
    }
    if (level == FusionLevel::kWord && !entry.path.empty()) {
      throw ArgumentError("word-level entry carries a subword path: " + word);
    }
    if (level == FusionLevel::kSubword) {
      if (entry.path.empty()) {
        throw ArgumentError("subword-level entry has no unit path: " + word);
      }
      std::string concat;
      double total = 0.0;
      for (const auto& arc : entry.path) {
        if (!IsValidToken(arc.unit)) {
          throw ArgumentError("invalid unit in path of: " + word);
        }
        concat += arc.unit;
        total += arc.weight;
      }
      if (concat != word) {
        throw ArgumentError("unit path does not spell word: " + word);
      }
      if (std::abs(total - entry.arc_weight) >
          1e-9 * std::max(1.0, std::abs(entry.arc_weight))) {
        throw ArgumentError("unit weights do not sum to arc weight: " + word);
      }
    }
    auto it = fst.entries_.find(word);
    if (it != fst.entries_.end()) {
      bool same = it->second.arc_weight == entry.arc_weight &&
                  it->second.path.size() == entry.path.size();
      for (size_t i = 0; same && i < entry.path.size(); ++i) {
        same = it->second.path[i].unit == entry.path[i].unit;
      }
      if (!same) throw ArgumentError("conflicting entries for word: " + word);
      continue;
    }
    fst.entries_.emplace(word, std::move(entry));
  }
  fst.BuildTrie();
  return fst;
}

void UnigramFst::BuildTrie() {
  trie_.clear();
  trie_.emplace_back();
  if (level_ != FusionLevel::kSubword) return;
  // Insert in sorted order so node numbering is deterministic.
  for (const auto& word : Words()) {
    const FstEntry& entry = entries_.at(word);
    int node = 0;
    double cumulative = 0.0;
    for (const auto& arc : entry.path) {
      cumulative -= arc.weight;
      auto& children = trie_[static_cast<size_t>(node)].children;
      auto it = children.find(arc.unit);
      int next;
      if (it == children.end()) {
        next = static_cast<int>(trie_.size());
        trie_[static_cast<size_t>(node)].children.emplace(arc.unit, next);
        TrieNode fresh;
        fresh.potential = cumulative;
        trie_.push_back(std::move(fresh));
      } else {
        next = it->second;
        auto& n = trie_[static_cast<size_t>(next)];
        n.potential = std::max(n.potential, cumulative);
      }
      node = next;
    }
    auto& leaf = trie_[static_cast<size_t>(node)];
    leaf.terminal = true;
    leaf.reward = -entry.arc_weight;
    leaf.potential = std::max(leaf.potential, leaf.reward);
  }
}

FusionReward UnigramFst::Lookup(std::string_view word) const {
  const FstEntry* e = Find(word);
  return FusionReward{e ? -e->arc_weight : 0.0};
}

const FstEntry* UnigramFst::Find(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

double UnigramFst::ScoreSequence(std::span<const std::string> words) const {
  double total = 0.0;
  for (const auto& w : words) total += Lookup(w).log_reward;
  return total;
}

std::vector<std::string> UnigramFst::Words() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [word, entry] : entries_) out.push_back(word);
  std::sort(out.begin(), out.end());
  return out;
}

int UnigramFst::Child(int node, std::string_view unit) const {
  const auto& children = trie_[static_cast<size_t>(node)].children;
  auto it = children.find(std::string(unit));
  return it == children.end() ? -1 : it->second;
}

std::optional<double> UnigramFst::TerminalReward(int node) const {
  const auto& n = trie_[static_cast<size_t>(node)];
  if (!n.terminal) return std::nullopt;
  return n.reward;
}

std::string UnigramFst::Serialize() const {
  std::string out(kHeaderPrefix);
  out += ToString(level_);
  out += '\n';
  for (const auto& word : Words()) {
    const FstEntry& e = entries_.at(word);
    out += word;
    out += '\t';
    out += FormatFixed6(e.arc_weight);
    if (level_ == FusionLevel::kSubword) {
      out += '\t';
      for (size_t i = 0; i < e.path.size(); ++i) {
        if (i > 0) out += ' ';
        out += e.path[i].unit;
      }
    }
    out += '\n';
  }
  return out;
}

UnigramFst UnigramFst::Deserialize(std::string_view text) {
  auto lines = SplitFields(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("missing header", 1);
  std::string header = lines[0];
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header.rfind(kHeaderPrefix, 0) != 0) {
    throw ParseError("expected header '#usf-fst v1 level=word|subword'", 1);
  }
  FusionLevel level;
  try {
    level = ParseFusionLevel(std::string_view(header).substr(kHeaderPrefix.size()));
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), 1);
  }
  const size_t want_fields = level == FusionLevel::kWord ? 2 : 3;

  std::unordered_map<std::string, std::pair<double, size_t>> seen;
  std::vector<std::pair<std::string, FstEntry>> entries;
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    std::string line = lines[i];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitFields(line, '\t');
    if (fields.size() != want_fields) {
      throw ParseError("expected " + std::to_string(want_fields) +
                           " tab-separated fields for level=" + ToString(level),
                       line_no);
    }
    std::string word = NormalizeNfc(fields[0]);
    if (!IsValidToken(word)) throw ParseError("invalid word", line_no);
    FstEntry entry;
    if (!ParseDouble(fields[1], &entry.arc_weight)) {
      throw ParseError("weight is not a finite number", line_no);
    }
    if (auto it = seen.find(word); it != seen.end()) {
      if (it->second.first != entry.arc_weight) {
        throw ParseError("conflicting weight for word '" + word +
                             "' (first seen on line " +
                             std::to_string(it->second.second) + ")",
                         line_no);
      }
    } else {
      seen.emplace(word, std::make_pair(entry.arc_weight, line_no));
    }
    if (level == FusionLevel::kSubword) {
      auto units = SplitWhitespace(fields[2]);
      if (units.empty()) throw ParseError("empty unit path", line_no);
      if (Join(units, "") != word) {
        throw ParseError("unit path does not spell '" + word + "'", line_no);
      }
      entry.path = DistributeWeight(units, entry.arc_weight);
    }
    entries.emplace_back(std::move(word), std::move(entry));
  }
  if (entries.empty()) throw ParseError("FST has no entries", 0);
  try {
    return FromEntries(level, std::move(entries));
  } catch (const ArgumentError& e) {
    throw ParseError(e.what(), 0);
  }
}

UnigramFst ReadFst(const std::string& path) {
  return UnigramFst::Deserialize(ReadFile(path));
}

}  // namespace usf
