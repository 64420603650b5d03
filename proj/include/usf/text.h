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

#ifndef USF_TEXT_H_
#define USF_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace usf {

// Unicode NFC normalization. Invalid UTF-8 is replaced by U+FFFD.
std::string NormalizeNfc(std::string_view text);

// Full Unicode lowercasing (root locale).
std::string Lowercase(std::string_view text);

// Splits on ASCII whitespace; empty tokens are dropped.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> SplitFields(std::string_view text, char delim);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Byte offsets of every code point start in `text`, plus text.size().
// The result always begins with 0.
std::vector<size_t> CodepointBoundaries(std::string_view text);

// Number of UTF-8 code points.
size_t CodepointCount(std::string_view text);

// A token is non-empty and has no ASCII or Unicode whitespace.
bool IsValidToken(std::string_view token);

// "%.6f", with "-0.000000" folded to "0.000000".
std::string FormatFixed6(double value);

// Parses a finite double; the whole field must be consumed.
bool ParseDouble(std::string_view field, double* out);
bool ParseInt64(std::string_view field, long long* out);

// File helpers. All of them throw IoError.
std::vector<std::string> ReadLines(const std::string& path);
std::string ReadFile(const std::string& path);

// Writes to a sibling temporary and renames it into place, so a failed
// write never leaves a partial file at `path`.
void WriteFileAtomic(const std::string& path, std::string_view contents);

}  // namespace usf

#endif  // USF_TEXT_H_
