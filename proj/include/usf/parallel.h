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

#ifndef USF_PARALLEL_H_
#define USF_PARALLEL_H_

namespace usf {

// Worker count used by every OpenMP kernel in the library. Defaults to the
// USF_JOBS environment variable when set, otherwise the OpenMP default.
int Jobs();

// n <= 0 restores the default.
void SetJobs(int n);

}  // namespace usf

#endif  // USF_PARALLEL_H_
