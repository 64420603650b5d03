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

#include "usf/lab.h"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "json.hpp"
#include "usf/error.h"
#include "usf/logmath.h"
#include "usf/parallel.h"
#include "usf/text.h"

namespace usf {

namespace {

SubwordInventory MakeInventory(const std::vector<std::string>& units,
                               const std::string& end_unit) {
  std::vector<std::string> inv;
  for (const auto& u : units) {
    if (u != end_unit) inv.push_back(u);
  }
  return SubwordInventory::Uniform(inv);
}

}  // namespace

EmissionModel::EmissionModel(std::vector<std::string> units, size_t steps,
                             std::vector<double> log_table,
                             std::string end_unit)
    : units_(std::move(units)),
      steps_(steps),
      table_(std::move(log_table)),
      inventory_(MakeInventory(units_, end_unit)) {
  if (steps_ == 0) throw ArgumentError("emission model needs at least one step");
  if (table_.size() != steps_ * units_.size()) {
    throw ArgumentError("log_table has " + std::to_string(table_.size()) +
                        " entries, expected steps x units = " +
                        std::to_string(steps_ * units_.size()));
  }
  for (size_t i = 0; i < units_.size(); ++i) {
    if (!index_.emplace(units_[i], static_cast<int>(i)).second) {
      throw ArgumentError("duplicate unit: " + units_[i]);
    }
  }
  auto it = index_.find(end_unit);
  if (it == index_.end()) throw ArgumentError("end unit '" + end_unit + "' not in units");
  end_ = static_cast<size_t>(it->second);
  for (size_t t = 0; t < steps_; ++t) {
    for (size_t u = 0; u < units_.size(); ++u) {
      if (!std::isfinite(log_prob(t, u))) {
        throw ArgumentError("non-finite log_table entry at step " + std::to_string(t));
      }
    }
    const double z = LogSumExp(std::span<const double>(&table_[t * units_.size()],
                                                       units_.size()));
    if (std::abs(z) > 1e-9) {
      throw ArgumentError("log_table row " + std::to_string(t) +
                          " is not normalized (log-sum-exp " + std::to_string(z) + ")");
    }
  }
}

int EmissionModel::UnitIndex(std::string_view unit) const {
  auto it = index_.find(std::string(unit));
  return it == index_.end() ? -1 : it->second;
}

EmissionModel ParseEmissionModelJson(std::string_view text) {
  using Json = nlohmann::json;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid emission model JSON: ") + e.what(), 0);
  }
  try {
    const size_t steps = j.at("steps").get<size_t>();
    auto units = j.at("units").get<std::vector<std::string>>();
    std::vector<double> table;
    for (const auto& x : j.at("log_table")) {
      if (x.is_array()) {
        if (x.size() != units.size()) {
          throw ParseError("log_table row width differs from unit count", 0);
        }
        for (const auto& y : x) table.push_back(y.get<double>());
      } else {
        table.push_back(x.get<double>());
      }
    }
    std::string end_unit(kDefaultEndUnit);
    if (j.contains("end_unit")) end_unit = j["end_unit"].get<std::string>();
    return EmissionModel(std::move(units), steps, std::move(table), end_unit);
  } catch (const Json::exception& e) {
    throw ParseError(std::string("emission model: ") + e.what(), 0);
  } catch (const ArgumentError& e) {
    throw ParseError(std::string("emission model: ") + e.what(), 0);
  }
}

EmissionModel ReadEmissionModel(const std::string& path) {
  return ParseEmissionModelJson(ReadFile(path));
}

std::string FormatEmissionModelJson(const EmissionModel& em) {
  nlohmann::ordered_json j;
  j["steps"] = em.steps();
  j["units"] = em.units();
  j["end_unit"] = em.end_unit();
  j["log_table"] = em.log_table();
  return j.dump() + "\n";
}

Lexicon::Lexicon(std::span<const std::string> words, const SubwordInventory& inv,
                 size_t cap) {
  if (words.empty()) throw ArgumentError("empty lexicon");
  words_.assign(words.begin(), words.end());
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  for (const auto& w : words_) {
    segs_.emplace(w, EnumerateSegmentations(w, inv, cap));
    const auto bounds = CodepointBoundaries(w);
    for (size_t b : bounds) prefixes_.insert(w.substr(0, b));
  }
}

bool Lexicon::Contains(std::string_view word) const {
  return segs_.count(std::string(word)) > 0;
}

bool Lexicon::IsPrefix(std::string_view text) const {
  return prefixes_.count(std::string(text)) > 0;
}

const std::vector<Segmentation>& Lexicon::segmentations(std::string_view word) const {
  auto it = segs_.find(std::string(word));
  if (it == segs_.end()) throw ArgumentError("word not in lexicon: " + std::string(word));
  return it->second;
}

std::vector<std::string> ReadLexiconWords(const std::string& path) {
  std::vector<std::string> words;
  for (const auto& line : ReadLines(path)) {
    for (auto& tok : SplitWhitespace(NormalizeNfc(line))) words.push_back(std::move(tok));
  }
  return words;
}

double SeqLogprob(const EmissionModel& em, std::span<const std::string> units) {
  if (units.size() > em.steps()) {
    throw ArgumentError("sequence of " + std::to_string(units.size()) +
                        " units exceeds " + std::to_string(em.steps()) + " steps");
  }
  double total = 0.0;
  for (size_t t = 0; t < em.steps(); ++t) {
    size_t u = em.end_index();
    if (t < units.size()) {
      const int idx = em.UnitIndex(units[t]);
      if (idx < 0) throw ArgumentError("unit not in inventory: " + units[t]);
      u = static_cast<size_t>(idx);
    }
    total += em.log_prob(t, u);
  }
  return total;
}

namespace {

enum class Semiring { kLog, kMax };

// Forward pass over (steps used, code points covered). A path that covers
// the word in t < T steps is padded with the end unit for the rest.
double WordPosterior(const EmissionModel& em, const Lexicon& lex,
                     std::string_view word, Semiring semiring) {
  if (!lex.Contains(word)) {
    throw ArgumentError("word not in lexicon: " + std::string(word));
  }
  const auto edges = BuildSegmentLattice(word, em.inventory());
  const size_t n = edges.size();
  const size_t T = em.steps();
  auto plus = [semiring](double a, double b) {
    return semiring == Semiring::kLog ? LogAdd(a, b) : std::max(a, b);
  };
  std::vector<std::vector<double>> alpha(T + 1, std::vector<double>(n + 1, kLogZero));
  alpha[0][0] = 0.0;
  for (size_t t = 0; t < T; ++t) {
    for (size_t i = 0; i < n; ++i) {
      if (alpha[t][i] == kLogZero) continue;
      for (const auto& e : edges[i]) {
        const auto u = static_cast<size_t>(em.UnitIndex(e.unit));
        alpha[t + 1][e.end] = plus(alpha[t + 1][e.end], alpha[t][i] + em.log_prob(t, u));
      }
    }
  }
  // pad[t]: end-unit score for steps t..T-1.
  std::vector<double> pad(T + 1, 0.0);
  for (size_t t = T; t-- > 0;) pad[t] = pad[t + 1] + em.log_prob(t, em.end_index());
  double total = kLogZero;
  for (size_t t = 1; t <= T; ++t) {
    if (alpha[t][n] == kLogZero) continue;
    total = plus(total, alpha[t][n] + pad[t]);
  }
  return total;
}

}  // namespace

double WordPosteriorSum(const EmissionModel& em, const Lexicon& lex,
                        std::string_view word) {
  return WordPosterior(em, lex, word, Semiring::kLog);
}

double WordPosteriorMax(const EmissionModel& em, const Lexicon& lex,
                        std::string_view word) {
  return WordPosterior(em, lex, word, Semiring::kMax);
}

namespace {

struct BeamItem {
  std::vector<int> units;
  std::string text;
  double emission = 0.0;
  double fusion = 0.0;
  OnTheFlyFuser::State state;
  bool ended = false;

  double total() const { return emission + fusion; }
};

bool BeamLess(const BeamItem& a, const BeamItem& b) {
  if (a.total() != b.total()) return a.total() > b.total();
  return a.units < b.units;
}

void FinishItem(BeamItem& item, const OnTheFlyFuser* fuser) {
  item.ended = true;
  if (fuser == nullptr) return;
  if (fuser->level() == FusionLevel::kWord) {
    item.fusion += fuser->Advance(item.state, item.text);
  }
  item.fusion += fuser->Finish(item.state);
}

}  // namespace

NBestList BeamSearch(const EmissionModel& em, const Lexicon& lex,
                     size_t beam_width, const OnTheFlyFuser* fuser) {
  if (beam_width < 1) throw ArgumentError("beam width must be >= 1");
  const size_t end = em.end_index();
  std::vector<BeamItem> beam(1);
  for (size_t t = 0; t < em.steps(); ++t) {
    std::vector<BeamItem> next;
    for (const auto& item : beam) {
      if (item.ended) {
        BeamItem ext = item;
        ext.units.push_back(static_cast<int>(end));
        ext.emission += em.log_prob(t, end);
        next.push_back(std::move(ext));
        continue;
      }
      for (size_t u = 0; u < em.num_units(); ++u) {
        if (u == end) {
          if (item.text.empty() || !lex.Contains(item.text)) continue;
          BeamItem ext = item;
          ext.units.push_back(static_cast<int>(u));
          ext.emission += em.log_prob(t, u);
          FinishItem(ext, fuser);
          next.push_back(std::move(ext));
          continue;
        }
        std::string text = item.text + em.units()[u];
        if (!lex.IsPrefix(text)) continue;
        BeamItem ext = item;
        ext.units.push_back(static_cast<int>(u));
        ext.text = std::move(text);
        ext.emission += em.log_prob(t, u);
        if (fuser != nullptr && fuser->level() == FusionLevel::kSubword) {
          ext.fusion += fuser->Advance(ext.state, em.units()[u]);
        }
        next.push_back(std::move(ext));
      }
    }
    std::sort(next.begin(), next.end(), BeamLess);
    if (next.size() > beam_width) next.resize(beam_width);
    beam = std::move(next);
  }

  std::map<std::string, BeamItem> best;
  for (auto& item : beam) {
    if (!item.ended) {
      if (item.text.empty() || !lex.Contains(item.text)) continue;
      FinishItem(item, fuser);
    }
    auto it = best.find(item.text);
    if (it == best.end() || BeamLess(item, it->second)) best[item.text] = item;
  }

  NBestList out;
  for (const auto& [word, item] : best) {
    Hypothesis h;
    h.words = {word};
    std::vector<std::string> units;
    for (int u : item.units) {
      if (static_cast<size_t>(u) != end) units.push_back(em.units()[static_cast<size_t>(u)]);
    }
    h.subwords = std::move(units);
    h.base_logprob = item.emission;
    h.usf_logprob = item.fusion;
    h.combined = item.total();
    out.hyps.push_back(std::move(h));
  }
  std::stable_sort(out.hyps.begin(), out.hyps.end(),
                   [](const Hypothesis& a, const Hypothesis& b) {
                     return *a.combined > *b.combined;
                   });
  return out;
}

namespace {

std::string Argmax(const std::vector<std::string>& words,
                   const std::vector<double>& scores) {
  size_t best = 0;
  for (size_t i = 1; i < words.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return words[best];
}

// Viterbi score of `word` once USF rewards its FST path (or the word
// itself at word level).
double FusedMax(const EmissionModel& em, const SearchErrorRow& row,
                const UnigramFst& fst, double alpha) {
  const FstEntry* entry = fst.Find(row.word);
  if (entry == nullptr) return row.logp_max;
  if (fst.level() == FusionLevel::kWord) return row.logp_max + alpha * -entry->arc_weight;
  if (entry->path.size() > em.steps()) return row.logp_max;
  std::vector<std::string> units;
  for (const auto& arc : entry->path) units.push_back(arc.unit);
  return std::max(row.logp_max, SeqLogprob(em, units) + alpha * -entry->arc_weight);
}

void FillRow(const EmissionModel& em, const Lexicon& lex, SearchErrorRow& row) {
  row.n_segs = lex.segmentations(row.word).size();
  row.logp_sum = WordPosteriorSum(em, lex, row.word);
  row.logp_max = WordPosteriorMax(em, lex, row.word);
  row.gap = (row.logp_sum == kLogZero) ? 0.0 : row.logp_sum - row.logp_max;
}

void Decide(const EmissionModel& em, const Lexicon& lex, const UnigramFst* fst,
            std::span<const double> alpha_grid, std::vector<SearchErrorRow>& rows) {
  const auto& words = lex.words();
  std::vector<double> sums, maxes;
  for (const auto& r : rows) {
    sums.push_back(r.logp_sum);
    maxes.push_back(r.logp_max);
  }
  const std::string sum_winner = Argmax(words, sums);
  const std::string max_winner = Argmax(words, maxes);
  std::vector<double> grid(alpha_grid.begin(), alpha_grid.end());
  std::sort(grid.begin(), grid.end());
  for (auto& row : rows) {
    row.search_error = row.word == sum_winner && row.word != max_winner;
    if (!row.search_error || fst == nullptr) continue;
    for (double alpha : grid) {
      std::vector<double> fused;
      for (const auto& r : rows) fused.push_back(FusedMax(em, r, *fst, alpha));
      if (Argmax(words, fused) == row.word) {
        row.repair_alpha = alpha;
        break;
      }
    }
  }
}

}  // namespace

std::string SumDecision(const EmissionModel& em, const Lexicon& lex) {
  std::vector<double> s;
  for (const auto& w : lex.words()) s.push_back(WordPosteriorSum(em, lex, w));
  return Argmax(lex.words(), s);
}

std::string MaxDecision(const EmissionModel& em, const Lexicon& lex) {
  std::vector<double> s;
  for (const auto& w : lex.words()) s.push_back(WordPosteriorMax(em, lex, w));
  return Argmax(lex.words(), s);
}

namespace serial {

std::vector<SearchErrorRow> SearchErrorReport(const EmissionModel& em,
                                              const Lexicon& lex,
                                              const UnigramFst* fst,
                                              std::span<const double> alpha_grid) {
  std::vector<SearchErrorRow> rows(lex.words().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    rows[i].word = lex.words()[i];
    FillRow(em, lex, rows[i]);
  }
  Decide(em, lex, fst, alpha_grid, rows);
  return rows;
}

}  // namespace serial

std::vector<SearchErrorRow> SearchErrorReport(const EmissionModel& em,
                                              const Lexicon& lex,
                                              const UnigramFst* fst,
                                              std::span<const double> alpha_grid) {
  const int jobs = Jobs();
  std::vector<SearchErrorRow> rows(lex.words().size());
  const long long n = static_cast<long long>(rows.size());
  std::vector<std::exception_ptr> errors(rows.size());
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 8) if (jobs > 1 && n >= 32)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<size_t>(i);
    try {
      rows[idx].word = lex.words()[idx];
      FillRow(em, lex, rows[idx]);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Decide(em, lex, fst, alpha_grid, rows);
  return rows;
}

namespace {

std::string FormatAlpha(double a) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", a);
  return buf;
}

std::string FormatLog(double x) {
  if (x == kLogZero) return "-inf";
  return FormatFixed6(x);
}

}  // namespace

std::string FormatSearchErrorTsv(const std::vector<SearchErrorRow>& rows) {
  std::string out = "word\tn_segs\tlogp_sum\tlogp_max\tgap\tflipped_by_alpha\n";
  for (const auto& r : rows) {
    out += r.word;
    out += '\t' + std::to_string(r.n_segs);
    out += '\t' + FormatLog(r.logp_sum);
    out += '\t' + FormatLog(r.logp_max);
    out += '\t' + FormatFixed6(r.gap);
    out += '\t';
    if (!r.search_error) {
      out += '-';
    } else if (r.repair_alpha) {
      out += FormatAlpha(*r.repair_alpha);
    } else {
      out += "none";
    }
    out += '\n';
  }
  return out;
}

}  // namespace usf
