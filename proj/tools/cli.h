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

#ifndef USF_TOOLS_CLI_H_
#define USF_TOOLS_CLI_H_

#include <string>
#include <vector>

namespace usf::cli {

// Runs the `usf` command line. Returns the process exit status:
// 0 on success, 2 for I/O failures, 1 for any other error.
int Run(int argc, const char* const* argv);

// Convenience for tests; args excludes the program name.
int Run(const std::vector<std::string>& args);

}  // namespace usf::cli

#endif  // USF_TOOLS_CLI_H_
