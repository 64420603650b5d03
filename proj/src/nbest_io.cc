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

#include "usf/nbest_io.h"

#include <cmath>
#include <unordered_set>

#include "json.hpp"
#include "usf/error.h"
#include "usf/text.h"

namespace usf {

namespace {

using Json = nlohmann::ordered_json;

double RequireNumber(const Json& obj, const char* key, size_t line_no) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(std::string("'") + key + "' must be a number", line_no);
  }
  double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ParseError(std::string("'") + key + "' is not finite", line_no);
  }
  return v;
}

Hypothesis ParseHypothesis(const Json& j, std::string_view marker,
                           size_t line_no) {
  if (!j.is_object()) throw ParseError("hypothesis must be an object", line_no);
  Hypothesis h;
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) {
    throw ParseError("hypothesis 'text' must be a string", line_no);
  }
  h.words = SplitWhitespace(NormalizeNfc(text->get<std::string>()));
  h.base_logprob = RequireNumber(j, "base_logprob", line_no);

  if (auto it = j.find("nlm_logprob"); it != j.end() && !it->is_null()) {
    h.nlm_logprob = RequireNumber(j, "nlm_logprob", line_no);
  }
  if (auto it = j.find("subwords"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw ParseError("'subwords' must be an array or null", line_no);
    }
    std::vector<std::string> units;
    for (const auto& u : *it) {
      if (!u.is_string()) throw ParseError("subword units must be strings", line_no);
      units.push_back(NormalizeNfc(u.get<std::string>()));
    }
    auto groups = GroupSubwords(units, marker);
    bool ok = groups.size() == h.words.size();
    for (size_t i = 0; ok && i < groups.size(); ++i) {
      ok = Join(groups[i], "") == h.words[i];
    }
    if (!ok) {
      throw ParseError("subwords do not reconstruct text '" + Join(h.words, " ") + "'",
                       line_no);
    }
    h.subwords = std::move(units);
  }
  if (auto it = j.find("combined"); it != j.end() && !it->is_null()) {
    h.combined = RequireNumber(j, "combined", line_no);
  }
  return h;
}

}  // namespace

std::vector<NBestList> ParseNbestJsonl(std::string_view text,
                                       std::string_view marker) {
  std::vector<NBestList> data;
  std::unordered_set<std::string> ids;
  size_t line_no = 0;
  for (auto& line : SplitFields(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (SplitWhitespace(line).empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("expected a JSON object", line_no);

    NBestList nb;
    auto id = j.find("utt_id");
    if (id == j.end() || !id->is_string()) {
      throw ParseError("'utt_id' must be a string", line_no);
    }
    nb.utt_id = id->get<std::string>();
    if (!ids.insert(nb.utt_id).second) {
      throw ParseError("duplicate utt_id '" + nb.utt_id + "'", line_no);
    }
    if (auto ref = j.find("ref"); ref != j.end() && !ref->is_null()) {
      if (!ref->is_string()) throw ParseError("'ref' must be a string or null", line_no);
      nb.reference = NormalizeNfc(ref->get<std::string>());
    }
    auto hyps = j.find("hyps");
    if (hyps == j.end() || !hyps->is_array() || hyps->empty()) {
      throw ParseError("'hyps' must be a non-empty array", line_no);
    }
    for (const auto& hj : *hyps) nb.hyps.push_back(ParseHypothesis(hj, marker, line_no));
    data.push_back(std::move(nb));
  }
  return data;
}

std::vector<NBestList> ReadNbestJsonl(const std::string& path,
                                      std::string_view marker) {
  return ParseNbestJsonl(ReadFile(path), marker);
}

std::string FormatNbestJsonl(const std::vector<NBestList>& data) {
  std::string out;
  for (const auto& nb : data) {
    Json j;
    j["utt_id"] = nb.utt_id;
    j["ref"] = nb.reference ? Json(*nb.reference) : Json(nullptr);
    Json hyps = Json::array();
    for (const auto& h : nb.hyps) {
      Json hj;
      hj["text"] = h.text();
      hj["subwords"] = h.subwords ? Json(*h.subwords) : Json(nullptr);
      hj["base_logprob"] = h.base_logprob;
      hj["nlm_logprob"] = h.nlm_logprob ? Json(*h.nlm_logprob) : Json(nullptr);
      if (h.combined) hj["combined"] = *h.combined;
      hyps.push_back(std::move(hj));
    }
    j["hyps"] = std::move(hyps);
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace usf
