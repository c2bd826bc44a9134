// Copyright (c) the jpegspace authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JPEGSPACE_PARALLEL_H_
#define JPEGSPACE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace jpegspace {

// Worker count: hardware concurrency, capped by JPEGSPACE_THREADS when set.
size_t ThreadCount();

// Runs fn(i) for i in [0, n). Iterations are split into contiguous chunks,
// one per worker; fn must only write state owned by index i. The first
// exception thrown by any worker is rethrown on the calling thread.
void ParallelFor(size_t n, const std::function<void(size_t)>& fn);

}  // namespace jpegspace

#endif  // JPEGSPACE_PARALLEL_H_
