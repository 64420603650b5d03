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

#include "usf/parallel.h"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace usf {

namespace {

std::atomic<int> g_jobs{0};

int DefaultJobs() {
  if (const char* env = std::getenv("USF_JOBS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

}  // namespace

int Jobs() {
  int n = g_jobs.load(std::memory_order_relaxed);
  return n > 0 ? n : DefaultJobs();
}

void SetJobs(int n) { g_jobs.store(n > 0 ? n : 0, std::memory_order_relaxed); }

}  // namespace usf
