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

#include <gtest/gtest.h>

#include "usf/error.h"

namespace usf {
namespace {

const std::string kM(kDefaultBoundaryMarker);

size_t ErrorLine(const std::string& text) {
  try {
    ParseNbestJsonl(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(NbestIoTest, ParsesFullRecord) {
  const std::string line =
      R"({"utt_id":"u1","ref":"play bacc","hyps":[)"
      R"({"text":"play back","subwords":[")" + kM + R"(play",")" + kM +
      R"(back"],"base_logprob":-3.5,"nlm_logprob":-7.25},)"
      R"({"text":"play bacc","base_logprob":-3.75}]})";
  const auto data = ParseNbestJsonl(line + "\n");
  ASSERT_EQ(data.size(), 1u);
  EXPECT_EQ(data[0].utt_id, "u1");
  EXPECT_EQ(*data[0].reference, "play bacc");
  ASSERT_EQ(data[0].hyps.size(), 2u);
  EXPECT_EQ(data[0].hyps[0].words, (std::vector<std::string>{"play", "back"}));
  EXPECT_EQ(data[0].hyps[0].subwords->size(), 2u);
  EXPECT_DOUBLE_EQ(*data[0].hyps[0].nlm_logprob, -7.25);
  EXPECT_FALSE(data[0].hyps[1].nlm_logprob.has_value());
  EXPECT_FALSE(data[0].hyps[1].subwords.has_value());
}

TEST(NbestIoTest, RoundTripIsStable) {
  const std::string text =
      R"({"utt_id":"a","ref":null,"hyps":[{"text":"x y","base_logprob":-1.5}]})"
      "\n"
      R"({"utt_id":"b","ref":"z","hyps":[{"text":"z","base_logprob":-0.5,"nlm_logprob":-2.0,"combined":-1.0}]})"
      "\n";
  const auto data = ParseNbestJsonl(text);
  const std::string once = FormatNbestJsonl(data);
  EXPECT_EQ(FormatNbestJsonl(ParseNbestJsonl(once)), once);
  EXPECT_NE(once.find(R"("combined":-1.0)"), std::string::npos);
}

TEST(NbestIoTest, BlankLinesAreSkipped) {
  EXPECT_EQ(ParseNbestJsonl("\n  \n{\"utt_id\":\"a\",\"hyps\":[{\"text\":\"x\",\"base_logprob\":0}]}\n\n").size(), 1u);
}

TEST(NbestIoTest, MalformedInputReportsLine) {
  const std::string ok = R"({"utt_id":"a","hyps":[{"text":"x","base_logprob":-1}]})";
  EXPECT_EQ(ErrorLine(ok + "\n{not json\n"), 2u);
  EXPECT_EQ(ErrorLine(ok + "\n" + ok + "\n"), 2u);
  EXPECT_EQ(ErrorLine(R"({"utt_id":"a","hyps":[]})"), 1u);
  EXPECT_EQ(ErrorLine(R"({"hyps":[{"text":"x","base_logprob":-1}]})"), 1u);
  EXPECT_EQ(ErrorLine(R"({"utt_id":"a","hyps":[{"text":"x"}]})"), 1u);
  EXPECT_EQ(ErrorLine(R"({"utt_id":"a","hyps":[{"text":"x","base_logprob":"bad"}]})"), 1u);
  EXPECT_EQ(ErrorLine(R"([1,2])"), 1u);
}

TEST(NbestIoTest, SubwordsMustSpellText) {
  const std::string bad = R"({"utt_id":"a","hyps":[{"text":"play bacc","subwords":[")" + kM +
                          R"(play",")" + kM + R"(ba","ck"],"base_logprob":-1}]})";
  EXPECT_EQ(ErrorLine(bad), 1u);
}

TEST(NbestIoTest, TextIsNfcNormalized) {
  const auto data = ParseNbestJsonl(
      "{\"utt_id\":\"a\",\"hyps\":[{\"text\":\"cafe\xCC\x81\",\"base_logprob\":-1}]}");
  EXPECT_EQ(data[0].hyps[0].words[0], "caf\xC3\xA9");
}

TEST(NbestIoTest, MissingFileIsIoError) {
  EXPECT_THROW(ReadNbestJsonl("/nonexistent/n.jsonl"), IoError);
}

}  // namespace
}  // namespace usf
