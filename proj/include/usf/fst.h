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

#ifndef USF_FST_H_
#define USF_FST_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "usf/segmentation.h"

namespace usf {

enum class FusionLevel { kWord, kSubword };

const char* ToString(FusionLevel level);
// Accepts "word" and "subword".
FusionLevel ParseFusionLevel(std::string_view text);

// Reward contributed to log P_USF by one word. Arc weights are tropical
// costs, so a matched word yields -arc_weight and an unmatched word takes
// the failure arc with weight 0.
struct FusionReward {
  double log_reward = 0.0;
};

struct SubwordArc {
  std::string unit;
  double weight = 0.0;
};

struct FstEntry {
  double arc_weight = 0.0;
  // Subword level only: the word's unit path. Unit weights sum to
  // arc_weight and the units concatenate to the word.
  std::vector<SubwordArc> path;
};

// Single-state unigram reward FST: one arc per rewarded word plus a
// zero-weight failure arc. At subword level each word becomes a path of
// unit arcs, stored as a prefix trie so partial words can be scored during
// decoding. Immutable once built; safe to share across threads.
class UnigramFst {
 public:
  // Every word gets `arc_weight`. Duplicate words are harmless. Subword
  // level needs `inventory`; each word is expanded along its Viterbi
  // segmentation with the weight spread evenly over the units.
  static UnigramFst Build(std::span<const std::string> words, double arc_weight,
                          FusionLevel level,
                          const SubwordInventory* inventory = nullptr);

  // Per-word construction. A repeated word must repeat its weight (and,
  // at subword level, its unit path); anything else is an ArgumentError.
  // Entries at word level must have an empty path.
  static UnigramFst FromEntries(
      FusionLevel level, std::vector<std::pair<std::string, FstEntry>> entries);

  FusionLevel level() const { return level_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  FusionReward Lookup(std::string_view word) const;
  const FstEntry* Find(std::string_view word) const;

  // Sum of Lookup over `words`.
  double ScoreSequence(std::span<const std::string> words) const;

  // Words in byte-wise order.
  std::vector<std::string> Words() const;

  // Subword prefix trie. Node 0 is the root. Child() returns -1 when no
  // stored path continues with `unit`.
  int Child(int node, std::string_view unit) const;
  // Largest cumulative log-reward reachable through the node's prefix
  // by any word whose path passes through it.
  double Potential(int node) const { return trie_[static_cast<size_t>(node)].potential; }
  // Full-word log-reward when some word's path ends exactly at `node`.
  std::optional<double> TerminalReward(int node) const;

  std::string Serialize() const;
  static UnigramFst Deserialize(std::string_view text);

 private:
  struct TrieNode {
    std::unordered_map<std::string, int> children;
    double potential = 0.0;
    bool terminal = false;
    double reward = 0.0;
  };

  UnigramFst() = default;
  void BuildTrie();

  FusionLevel level_ = FusionLevel::kWord;
  std::unordered_map<std::string, FstEntry> entries_;
  std::vector<TrieNode> trie_;
};

// Splits a word's total weight evenly over `units`; the last unit absorbs
// the rounding so that the weights sum to `arc_weight`.
std::vector<SubwordArc> DistributeWeight(const std::vector<std::string>& units,
                                         double arc_weight);

UnigramFst ReadFst(const std::string& path);

}  // namespace usf

#endif  // USF_FST_H_
