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

#ifndef USF_ERROR_H_
#define USF_ERROR_H_

#include <stdexcept>
#include <string>

namespace usf {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument to an operation (empty vocabulary, n_thresh < 2, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Inconsistent configuration, e.g. fusion level differs from the FST level.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A word cannot be split into inventory units.
class SegmentationError : public Error {
 public:
  using Error::Error;
};

// Segmentation enumeration produced more results than the caller allowed.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. line() is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  size_t line() const { return line_; }

 private:
  size_t line_;
};

}  // namespace usf

#endif  // USF_ERROR_H_
