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

#include "usf/demo.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <unordered_set>

#include "usf/error.h"
#include "usf/lm.h"
#include "usf/nbest_io.h"
#include "usf/segmentation.h"
#include "usf/text.h"

namespace usf {

namespace {

// std::mt19937_64 output is fixed by the standard; the distributions in
// <random> are not, so they are written out here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  size_t Index(size_t n) { return static_cast<size_t>(engine_() % n); }
  bool Chance(double p) { return Uniform() < p; }
  int64_t LogUniformInt(int64_t lo, int64_t hi) {
    const double x = std::exp(Uniform(std::log(static_cast<double>(lo)),
                                      std::log(static_cast<double>(hi) + 1.0)));
    return std::clamp(static_cast<int64_t>(x), lo, hi);
  }

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[Index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

class WordMaker {
 public:
  std::string Make(Rng& rng, size_t min_syl, size_t max_syl) {
    while (true) {
      const size_t n = min_syl + rng.Index(max_syl - min_syl + 1);
      std::string w;
      for (size_t i = 0; i < n; ++i) {
        w += kConsonants[rng.Index(kConsonants.size())];
        w += kVowels[rng.Index(kVowels.size())];
      }
      if (used_.insert(w).second) return w;
    }
  }

  std::vector<std::string> MakeMany(Rng& rng, size_t count, size_t min_syl,
                                    size_t max_syl) {
    std::vector<std::string> out;
    for (size_t i = 0; i < count; ++i) out.push_back(Make(rng, min_syl, max_syl));
    return out;
  }

 private:
  std::unordered_set<std::string> used_;
};

enum class Kind { kFixable, kDistractor, kSingleton, kGeneral, kGeneralDistractor };

struct Core {
  std::vector<std::string> words;
  double base = 0.0;
};

std::string PickOther(Rng& rng, const std::vector<std::string>& pool,
                      const std::string& avoid) {
  while (true) {
    const std::string& w = pool[rng.Index(pool.size())];
    if (w != avoid) return w;
  }
}

}  // namespace

EmissionModel WorkedInstanceModel() {
  // Rows: step 0 mostly picks "a" or "ab"; step 1 splits the remaining mass
  // over b : d : </s> as 0.25 : 0.45 : 0.4.
  std::vector<std::string> units = {"a", "b", "d", "ab", "</s>"};
  std::vector<double> p = {
      0.4925, 0.005, 0.005, 0.4925, 0.005,  // step 0
      0.005,  0.225, 0.405, 0.005,  0.36,   // step 1
  };
  std::vector<double> table;
  for (double x : p) table.push_back(std::log(x));
  return EmissionModel(units, 2, table, "</s>");
}

std::vector<std::string> WorkedInstanceLexicon() { return {"ab", "ad"}; }

DemoData GenerateDemo(const DemoConfig& cfg) {
  Rng rng(cfg.seed);
  WordMaker maker;

  const auto common = maker.MakeMany(rng, cfg.common_words, 2, 2);
  const auto topical = maker.MakeMany(rng, cfg.rare_distractor, 2, 3);
  const auto fixable = maker.MakeMany(rng, cfg.rare_fixable, 3, 4);
  const auto distractors =
      maker.MakeMany(rng, cfg.rare_distractor + cfg.general_distractor, 3, 4);
  const auto singletons = maker.MakeMany(rng, cfg.rare_singleton, 4, 5);
  const auto filler = maker.MakeMany(rng, cfg.filler_types, 3, 4);
  const auto filler_singletons = maker.MakeMany(rng, cfg.filler_singletons, 4, 5);

  // Training corpus.
  std::vector<std::string> bag;
  auto add = [&bag](const std::string& w, int64_t n) {
    for (int64_t i = 0; i < n; ++i) bag.push_back(w);
  };
  for (const auto& w : common) add(w, 600 + static_cast<int64_t>(rng.Index(2401)));
  for (const auto& w : topical) add(w, 600 + static_cast<int64_t>(rng.Index(901)));
  for (const auto& w : fixable) add(w, rng.LogUniformInt(2, 250));
  for (const auto& w : distractors) add(w, rng.LogUniformInt(2, 250));
  for (const auto& w : singletons) add(w, 1);
  for (const auto& w : filler) add(w, rng.LogUniformInt(2, 500));
  for (const auto& w : filler_singletons) add(w, 1);
  rng.Shuffle(bag);
  std::vector<std::string> corpus;
  for (size_t i = 0; i < bag.size();) {
    const size_t len = std::min(bag.size() - i, 8 + rng.Index(5));
    std::vector<std::string> line(bag.begin() + static_cast<long>(i),
                                  bag.begin() + static_cast<long>(i + len));
    corpus.push_back(Join(line, " "));
    i += len;
  }

  // Subword inventory: letters, CV syllables, and frequent words whole.
  std::vector<std::string> units;
  for (char c : kConsonants) units.emplace_back(1, c);
  for (char v : kVowels) units.emplace_back(1, v);
  for (char c : kConsonants) {
    for (char v : kVowels) units.push_back(std::string{c, v});
  }
  units.insert(units.end(), common.begin(), common.end());
  units.insert(units.end(), topical.begin(), topical.end());
  const SubwordInventory inventory = SubwordInventory::Uniform(units);
  const std::unordered_set<std::string> whole(units.begin(), units.end());

  const LmScoreSource lm = LmScoreSource::TrainNgram(corpus, 2, 0.1);

  // Test utterances in a fixed kind order, then shuffled.
  std::vector<std::pair<Kind, size_t>> plan;
  for (size_t i = 0; i < cfg.rare_fixable; ++i) plan.emplace_back(Kind::kFixable, i);
  for (size_t i = 0; i < cfg.rare_distractor; ++i) plan.emplace_back(Kind::kDistractor, i);
  for (size_t i = 0; i < cfg.rare_singleton; ++i) plan.emplace_back(Kind::kSingleton, i);
  for (size_t i = 0; i < cfg.general_clean; ++i) plan.emplace_back(Kind::kGeneral, i);
  for (size_t i = 0; i < cfg.general_distractor; ++i) {
    plan.emplace_back(Kind::kGeneralDistractor, i);
  }
  rng.Shuffle(plan);

  DemoData out{{}, {}, {}, {}, WorkedInstanceModel(), WorkedInstanceLexicon()};
  out.corpus = std::move(corpus);
  for (const auto& u : inventory.units()) out.inventory.emplace_back(u, inventory.logprob(u));

  size_t utt_index = 0;
  for (const auto& [kind, idx] : plan) {
    const size_t len = 3 + rng.Index(4);
    std::vector<std::string> ref;
    for (size_t i = 0; i < len; ++i) ref.push_back(common[rng.Index(common.size())]);
    const size_t p = rng.Index(len);
    size_t q = rng.Index(len - 1);
    if (q >= p) ++q;
    const double top = -(1.5 * static_cast<double>(len) + rng.Uniform(1.0, 3.0));

    std::vector<Core> cores;
    Core correct{ref, top};
    switch (kind) {
      case Kind::kFixable: {
        correct.words[p] = fixable[idx];
        Core confusion = correct;
        confusion.words[p] = common[rng.Index(common.size())];
        correct.base = top - rng.Uniform(0.05, 1.3);
        cores = {confusion, correct};
        break;
      }
      case Kind::kDistractor: {
        correct.words[p] = topical[idx];
        Core alt = correct;
        alt.words[q] = distractors[idx];
        alt.base = top - rng.Uniform(1.05, 1.9);
        cores = {correct, alt};
        break;
      }
      case Kind::kSingleton: {
        correct.words[p] = singletons[idx];
        Core alt = correct;
        alt.words[p] = common[rng.Index(common.size())];
        alt.base = top - rng.Uniform(0.05, 0.7);
        cores = {correct, alt};
        break;
      }
      case Kind::kGeneral:
        cores = {correct};
        break;
      case Kind::kGeneralDistractor: {
        Core alt = correct;
        alt.words[q] = distractors[cfg.rare_distractor + idx];
        alt.base = top - rng.Uniform(1.05, 1.9);
        cores = {correct, alt};
        break;
      }
    }
    const std::vector<std::string> reference = correct.words;

    if (rng.Chance(0.25)) {
      size_t r = rng.Index(len);
      while (r == p || (kind != Kind::kGeneral && r == q && len > 2)) r = rng.Index(len);
      const std::string wrong = PickOther(rng, common, reference[r]);
      for (auto& c : cores) c.words[r] = wrong;
    }

    std::set<std::vector<std::string>> seen;
    for (const auto& c : cores) seen.insert(c.words);
    const size_t n_cores = cores.size();
    for (size_t attempt = 0; cores.size() < cfg.nbest_size && attempt < 200; ++attempt) {
      Core f = cores[rng.Chance(0.75) ? 0 : rng.Index(n_cores)];
      const double source_base = f.base;
      const size_t edits = 1 + rng.Index(2);
      for (size_t e = 0; e < edits; ++e) {
        const size_t s = rng.Index(f.words.size());
        if (f.words.size() > 2 && rng.Chance(0.15)) {
          f.words.erase(f.words.begin() + static_cast<long>(s));
        } else {
          f.words[s] = PickOther(rng, common, f.words[s]);
        }
      }
      if (!seen.insert(f.words).second) continue;
      f.base = source_base - rng.Uniform(0.05, 1.5);
      cores.push_back(std::move(f));
    }
    std::stable_sort(cores.begin(), cores.end(),
                     [](const Core& a, const Core& b) { return a.base > b.base; });

    NBestList nb;
    char id[32];
    std::snprintf(id, sizeof(id), "utt%05zu", utt_index++);
    nb.utt_id = id;
    nb.reference = Join(reference, " ");
    for (const auto& c : cores) {
      Hypothesis h;
      h.words = c.words;
      h.base_logprob = c.base;
      h.nlm_logprob = lm.Score(c.words);
      std::vector<std::string> subwords;
      for (const auto& w : c.words) {
        Segmentation seg = ViterbiSegmentation(w, inventory);
        if (!whole.count(w) && rng.Chance(0.3)) {
          auto all = EnumerateSegmentations(w, inventory);
          if (all.size() > 1) {
            auto pick = all[rng.Index(all.size())];
            if (pick.units != seg.units) seg = std::move(pick);
          }
        }
        for (size_t k = 0; k < seg.units.size(); ++k) {
          subwords.push_back(k == 0 ? std::string(kDefaultBoundaryMarker) + seg.units[k]
                                    : seg.units[k]);
        }
      }
      h.subwords = std::move(subwords);
      nb.hyps.push_back(std::move(h));
    }
    out.testset.push_back({nb.utt_id, *nb.reference});
    out.nbest.push_back(std::move(nb));
  }
  return out;
}

void WriteDemo(const DemoData& data, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);
  const std::filesystem::path root(dir);

  std::string corpus;
  for (const auto& line : data.corpus) corpus += line + "\n";
  WriteFileAtomic((root / "corpus.txt").string(), corpus);
  WriteFileAtomic((root / "testset.tsv").string(), FormatTestsetTsv(data.testset));
  WriteFileAtomic((root / "nbest.jsonl").string(), FormatNbestJsonl(data.nbest));
  std::string inv;
  for (const auto& [unit, lp] : data.inventory) inv += unit + "\t" + FormatFixed6(lp) + "\n";
  WriteFileAtomic((root / "inventory.tsv").string(), inv);
  WriteFileAtomic((root / "lab_model.json").string(), FormatEmissionModelJson(data.lab_model));
  std::string lex;
  for (const auto& w : data.lab_lexicon) lex += w + "\n";
  WriteFileAtomic((root / "lab_lexicon.txt").string(), lex);
}

}  // namespace usf
