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

#include "usf/sweep.h"

#include <cstdio>
#include <map>
#include <unordered_set>

#include "usf/error.h"
#include "usf/text.h"

namespace usf {

const char* ToString(SweepParam p) {
  switch (p) {
    case SweepParam::kAlpha:
      return "alpha";
    case SweepParam::kNThresh:
      return "n_thresh";
    case SweepParam::kLevel:
      return "level";
  }
  return "?";
}

SweepParam ParseSweepParam(std::string_view text) {
  if (text == "alpha") return SweepParam::kAlpha;
  if (text == "n_thresh") return SweepParam::kNThresh;
  if (text == "level") return SweepParam::kLevel;
  throw ArgumentError("unknown sweep parameter: " + std::string(text));
}

std::vector<NBestList> FilterByIds(std::span<const NBestList> data,
                                   std::span<const TestUtterance> subset) {
  std::unordered_set<std::string> ids;
  for (const auto& u : subset) ids.insert(u.utt_id);
  std::vector<NBestList> out;
  for (const auto& nb : data) {
    if (ids.count(nb.utt_id)) out.push_back(nb);
  }
  return out;
}

SweepCell EvaluateCell(std::span<const NBestList> gen, std::span<const NBestList> rare,
                       const FusionParams& params, const UnigramFst* fst,
                       const LmScoreSource& lm, size_t oracle_depth) {
  SweepCell cell;
  auto gen_scored = RescoreDataset(gen, params, fst, lm);
  auto rare_scored = RescoreDataset(rare, params, fst, lm);
  cell.top1_gen = TopOneWer(gen_scored);
  cell.oracle_gen = OracleWer(gen_scored, oracle_depth);
  if (!rare_scored.empty()) {
    cell.top1_rare = TopOneWer(rare_scored);
    cell.oracle_rare = OracleWer(rare_scored, oracle_depth);
  }
  return cell;
}

namespace {

void FillWerr(const SweepCell& base, SweepCell& cell) {
  cell.werr_gen = Werr(base.top1_gen, cell.top1_gen);
  cell.oracle_werr_gen = Werr(base.oracle_gen, cell.oracle_gen);
  if (base.top1_rare.ref_tokens > 0) {
    cell.werr_rare = Werr(base.top1_rare, cell.top1_rare);
    cell.oracle_werr_rare = Werr(base.oracle_rare, cell.oracle_rare);
  }
}

struct FstKey {
  long long n_thresh;
  bool all;
  FusionLevel level;
  auto operator<=>(const FstKey&) const = default;
};

}  // namespace

SweepResult RunSweep(std::span<const NBestList> data, const VocabCounts& train_counts,
                     const LmScoreSource& lm, SweepParam param,
                     const std::vector<std::string>& grid, const SweepConfig& config) {
  if (grid.empty()) throw ArgumentError("sweep grid is empty");
  if (data.empty()) throw ArgumentError("sweep dataset is empty");
  config.params.Validate();

  std::vector<TestUtterance> testset;
  for (const auto& nb : data) {
    if (!nb.reference) throw ArgumentError("utterance '" + nb.utt_id + "' has no reference");
    testset.push_back({nb.utt_id, *nb.reference});
  }
  const auto rare_ids = ExtractRareTestset(testset);
  const auto rare = FilterByIds(data, rare_ids);

  SweepResult result;
  result.param = param;
  result.rare_utterances = rare.size();
  result.gen_utterances = data.size();
  result.baseline = EvaluateCell(data, rare, config.params, nullptr, lm, config.oracle_depth);
  result.baseline.label = "w/o USF";

  std::map<FstKey, UnigramFst> fsts;
  auto fst_for = [&](const FstKey& key) -> const UnigramFst& {
    auto it = fsts.find(key);
    if (it != fsts.end()) return it->second;
    auto band = SelectBand(train_counts, key.n_thresh, key.all);
    std::vector<std::string> words(band.begin(), band.end());
    if (words.empty()) {
      throw ArgumentError("band is empty for n_thresh=" + std::to_string(key.n_thresh));
    }
    return fsts.emplace(key, UnigramFst::Build(words, config.arc_weight, key.level,
                                               config.inventory))
        .first->second;
  };

  for (const auto& value : grid) {
    FusionParams params = config.params;
    FstKey key{config.n_thresh, config.include_all, config.params.level};
    switch (param) {
      case SweepParam::kAlpha:
        if (!ParseDouble(value, &params.alpha)) {
          throw ArgumentError("bad alpha grid value: " + value);
        }
        break;
      case SweepParam::kNThresh:
        if (value == "all") {
          key.all = true;
        } else {
          key.all = false;
          if (!ParseInt64(value, &key.n_thresh)) {
            throw ArgumentError("bad n_thresh grid value: " + value);
          }
        }
        break;
      case SweepParam::kLevel:
        key.level = ParseFusionLevel(value);
        params.level = key.level;
        break;
    }
    SweepCell cell = EvaluateCell(data, rare, params, &fst_for(key), lm, config.oracle_depth);
    cell.label = value;
    FillWerr(result.baseline, cell);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

std::string FormatSweepTsv(const SweepResult& result) {
  std::string out = "param\twerr_rare\toracle_werr_rare\twerr_gen\toracle_werr_gen\n";
  auto row = [&out](const std::string& label, const SweepCell& c) {
    out += label;
    for (double v : {c.werr_rare, c.oracle_werr_rare, c.werr_gen, c.oracle_werr_gen}) {
      out += '\t';
      out += FormatFixed6(v);
    }
    out += '\n';
  };
  row("baseline", result.baseline);
  for (const auto& c : result.cells) row(c.label, c);
  return out;
}

namespace {

std::string Percent(double werr, double oracle) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%% (%.1f%%)", 100.0 * werr, 100.0 * oracle);
  std::string s(buf);
  // "-0.0%" reads as a degradation; print it as 0.0%.
  for (size_t pos; (pos = s.find("-0.0%")) != std::string::npos;) s.erase(pos, 1);
  return s;
}

std::string Pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string FormatSweepTable(const SweepResult& result) {
  constexpr size_t kLabel = 12, kCol = 22;
  std::string out;
  out += Pad(ToString(result.param), kLabel) + Pad("D_rare", kCol) + "D_gen\n";
  out += Pad("w/o USF", kLabel) + Pad("baseline", kCol) + "baseline\n";
  for (const auto& c : result.cells) {
    out += Pad(c.label, kLabel) + Pad(Percent(c.werr_rare, c.oracle_werr_rare), kCol) +
           Percent(c.werr_gen, c.oracle_werr_gen) + "\n";
  }
  return out;
}

}  // namespace usf
