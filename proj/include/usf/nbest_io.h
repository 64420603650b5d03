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

#ifndef USF_NBEST_IO_H_
#define USF_NBEST_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "usf/fusion.h"

namespace usf {

// JSON-lines n-best files, one utterance per line:
//   {"utt_id": str, "ref": str|null,
//    "hyps": [{"text": str, "subwords": [str]|null,
//              "base_logprob": num, "nlm_logprob": num|null}]}
// Written files add "combined" to each hypothesis once it has been scored.
// Text is NFC-normalized on read. Errors carry the 1-based line number.
std::vector<NBestList> ParseNbestJsonl(
    std::string_view text,
    std::string_view marker = kDefaultBoundaryMarker);
std::vector<NBestList> ReadNbestJsonl(
    const std::string& path, std::string_view marker = kDefaultBoundaryMarker);

std::string FormatNbestJsonl(const std::vector<NBestList>& data);

}  // namespace usf

#endif  // USF_NBEST_IO_H_
