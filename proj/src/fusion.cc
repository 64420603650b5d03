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

#include "usf/fusion.h"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "usf/error.h"
#include "usf/parallel.h"
#include "usf/text.h"

namespace usf {

std::string Hypothesis::text() const { return Join(words, " "); }

const char* ToString(UsfStage stage) {
  return stage == UsfStage::kOnTheFly ? "on_the_fly" : "second_pass";
}

UsfStage ParseUsfStage(std::string_view text) {
  if (text == "on_the_fly" || text == "otf") return UsfStage::kOnTheFly;
  if (text == "second_pass" || text == "sp") return UsfStage::kSecondPass;
  throw ArgumentError("unknown USF stage: " + std::string(text));
}

void FusionParams::Validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw ArgumentError("alpha must be finite and >= 0");
  }
  if (!std::isfinite(beta) || beta < 0.0) {
    throw ArgumentError("beta must be finite and >= 0");
  }
  if (!std::isfinite(gamma)) throw ArgumentError("gamma must be finite");
  if (boundary_marker.empty()) throw ArgumentError("empty boundary marker");
}

std::vector<std::vector<std::string>> GroupSubwords(
    std::span<const std::string> subwords, std::string_view marker) {
  std::vector<std::vector<std::string>> groups;
  bool open = false;
  for (const auto& unit : subwords) {
    std::string_view piece = unit;
    if (piece.substr(0, marker.size()) == marker) {
      piece.remove_prefix(marker.size());
      groups.emplace_back();
      open = true;
    } else if (!open) {
      groups.emplace_back();
      open = true;
    }
    if (!piece.empty()) groups.back().emplace_back(piece);
  }
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

double UsfLogprob(const Hypothesis& h, const UnigramFst& fst,
                  std::string_view marker) {
  if (fst.level() == FusionLevel::kWord) return fst.ScoreSequence(h.words);
  if (!h.subwords) {
    throw ConfigError("subword-level fusion needs hypothesis subwords");
  }
  double total = 0.0;
  for (const auto& group : GroupSubwords(*h.subwords, marker)) {
    const FstEntry* entry = fst.Find(Join(group, ""));
    if (entry == nullptr || entry->path.size() != group.size()) continue;
    bool same = true;
    for (size_t i = 0; same && i < group.size(); ++i) {
      same = entry->path[i].unit == group[i];
    }
    if (same) total += -entry->arc_weight;
  }
  return total;
}

double CombinedScore(Hypothesis& h, const FusionParams& p,
                     const UnigramFst* fst, const LmScoreSource& lm) {
  if (fst != nullptr && fst->level() != p.level) {
    throw ConfigError(std::string("fusion level ") + ToString(p.level) +
                      " does not match FST level " + ToString(fst->level()));
  }
  if (!std::isfinite(h.base_logprob)) {
    throw ArgumentError("hypothesis base_logprob is not finite");
  }
  h.usf_logprob = fst ? UsfLogprob(h, *fst, p.boundary_marker) : 0.0;

  double nlm = 0.0;
  if (lm.kind() == LmScoreSource::Kind::kBuiltinNgram) {
    nlm = lm.Score(h.words);
  } else if (h.nlm_logprob) {
    nlm = *h.nlm_logprob;
  } else if (p.beta != 0.0) {
    throw ArgumentError("hypothesis '" + h.text() +
                        "' has no nlm_logprob but beta != 0");
  }

  const double n = static_cast<double>(h.word_count());
  const double score = (h.base_logprob + p.alpha * h.usf_logprob) / std::max(1.0, n) +
                       p.beta * nlm + p.gamma * n;
  h.combined = score;
  return score;
}

NBestList RescoreNbest(const NBestList& nb, const FusionParams& p,
                       const UnigramFst* fst, const LmScoreSource& lm) {
  if (nb.hyps.empty()) {
    throw ArgumentError("utterance '" + nb.utt_id + "' has no hypotheses");
  }
  p.Validate();
  NBestList out = nb;
  for (auto& h : out.hyps) CombinedScore(h, p, fst, lm);
  std::stable_sort(out.hyps.begin(), out.hyps.end(),
                   [](const Hypothesis& a, const Hypothesis& b) {
                     return *a.combined > *b.combined;
                   });
  return out;
}

namespace serial {

std::vector<NBestList> RescoreDataset(std::span<const NBestList> data,
                                      const FusionParams& p,
                                      const UnigramFst* fst,
                                      const LmScoreSource& lm) {
  std::vector<NBestList> out;
  out.reserve(data.size());
  for (const auto& nb : data) out.push_back(RescoreNbest(nb, p, fst, lm));
  return out;
}

}  // namespace serial

std::vector<NBestList> RescoreDataset(std::span<const NBestList> data,
                                      const FusionParams& p,
                                      const UnigramFst* fst,
                                      const LmScoreSource& lm) {
  const int jobs = Jobs();
  if (jobs <= 1 || data.size() < 64) return serial::RescoreDataset(data, p, fst, lm);
  std::vector<NBestList> out(data.size());
  const long long n = static_cast<long long>(data.size());
  // Exceptions must not escape the parallel region; keep the first one by
  // utterance index so the reported error matches the serial path.
  std::vector<std::exception_ptr> errors(data.size());
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 16)
  for (long long i = 0; i < n; ++i) {
    const auto idx = static_cast<size_t>(i);
    try {
      out[idx] = RescoreNbest(data[idx], p, fst, lm);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

OnTheFlyFuser::OnTheFlyFuser(const UnigramFst& fst, double alpha,
                             std::string marker)
    : fst_(&fst), alpha_(alpha), marker_(std::move(marker)) {}

double OnTheFlyFuser::CloseWord(State& state) const {
  double delta = 0.0;
  if (state.in_word) {
    std::optional<double> reward;
    if (!state.failed) reward = fst_->TerminalReward(state.node);
    delta = reward ? *reward - state.earned : -state.earned;
  }
  state = State{};
  return delta;
}

double OnTheFlyFuser::Advance(State& state, std::string_view unit) const {
  if (fst_->level() == FusionLevel::kWord) {
    return alpha_ * fst_->Lookup(unit).log_reward;
  }
  double delta = 0.0;
  std::string_view piece = unit;
  if (piece.substr(0, marker_.size()) == marker_) {
    delta += CloseWord(state);
    piece.remove_prefix(marker_.size());
    state.in_word = true;
  } else if (!state.in_word) {
    state.in_word = true;
  }
  if (piece.empty() || state.failed) return alpha_ * delta;

  const int next = fst_->Child(state.node, piece);
  if (next < 0) {
    delta -= state.earned;
    state.earned = 0.0;
    state.failed = true;
  } else {
    const double potential = fst_->Potential(next);
    delta += potential - state.earned;
    state.earned = potential;
    state.node = next;
  }
  return alpha_ * delta;
}

double OnTheFlyFuser::Finish(State& state) const {
  if (fst_->level() == FusionLevel::kWord) return 0.0;
  return alpha_ * CloseWord(state);
}

}  // namespace usf
