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

#ifndef USF_SEGMENTATION_H_
#define USF_SEGMENTATION_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace usf {

// A set of subword units with log-probabilities.
//
// Every code point that occurs inside any unit must itself be a unit, so
// any word spelled over the inventory's alphabet can be segmented.
class SubwordInventory {
 public:
  // Explicit scores; each must be finite and <= 0.
  explicit SubwordInventory(std::vector<std::pair<std::string, double>> units);

  // Log-uniform scores, -log(|units|).
  static SubwordInventory Uniform(const std::vector<std::string>& units);

  bool Contains(std::string_view unit) const;
  // Throws ArgumentError for unknown units.
  double logprob(std::string_view unit) const;

  size_t size() const { return logprob_.size(); }
  size_t max_unit_codepoints() const { return max_unit_codepoints_; }
  // Sorted byte-wise.
  std::vector<std::string> units() const;

 private:
  std::unordered_map<std::string, double> logprob_;
  size_t max_unit_codepoints_ = 0;
};

// TSV `unit<TAB>logprob`. A file whose lines all omit the logprob column
// yields a log-uniform inventory.
SubwordInventory ParseInventoryTsv(std::string_view text);
SubwordInventory ReadInventoryTsv(const std::string& path);

struct Segmentation {
  std::vector<std::string> units;
  double logprob = 0.0;

  bool operator==(const Segmentation& other) const {
    return units == other.units && logprob == other.logprob;
  }
};

// One inventory unit spanning code points [i, end) of a word, where i is
// the index of the list holding the edge.
struct LatticeEdge {
  size_t end;
  std::string unit;
  double logprob;
};

// edges[i] lists every unit that starts at code point i. Throws
// SegmentationError for an empty word or a character outside the inventory.
std::vector<std::vector<LatticeEdge>> BuildSegmentLattice(
    std::string_view word, const SubwordInventory& inv);

inline constexpr size_t kDefaultSegmentationCap = 10000;

// Total number of segmentations, saturating at SIZE_MAX. Zero when the word
// cannot be segmented.
size_t CountSegmentations(std::string_view word, const SubwordInventory& inv);

// Every distinct segmentation of `word`, ordered by unit count and then
// lexicographically by unit sequence. Throws SegmentationError for a
// character outside the inventory and OverflowError when more than `cap`
// segmentations exist.
std::vector<Segmentation> EnumerateSegmentations(
    std::string_view word, const SubwordInventory& inv,
    size_t cap = kDefaultSegmentationCap);

// Highest-logprob segmentation; ties go to fewer units, then to the
// lexicographically smaller unit sequence.
Segmentation ViterbiSegmentation(std::string_view word,
                                 const SubwordInventory& inv);

// log of the summed probability of all segmentations.
double MarginalLogprob(std::string_view word, const SubwordInventory& inv);

}  // namespace usf

#endif  // USF_SEGMENTATION_H_
