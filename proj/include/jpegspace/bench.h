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

// Wall-clock comparisons between pixel and coefficient-domain operators.
// Only the ratios are meaningful; absolute numbers depend on the machine.

#ifndef JPEGSPACE_BENCH_H_
#define JPEGSPACE_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace jpegspace {

struct BenchOptions {
  // Image edges; multiples of 8. Conv builds and the jpeg forward pass are
  // skipped above kMaxExplodedEdge.
  std::vector<size_t> sizes = {16, 32};
  size_t reps = 5;
  uint64_t seed = 1;
  // Channels for the GAP rows; more channels means longer, steadier timings.
  size_t gap_channels = 64;
  // Channels of the toy network in the forward rows.
  size_t net_channels = 2;
};

// Row names, per size:
//   gap_pixel, gap_jpeg, build_naive, build_fast, forward_pixel,
//   forward_jpeg
struct BenchRow {
  std::string name;
  size_t size = 0;
  size_t reps = 0;
  // 8x8 blocks touched by one evaluation.
  size_t blocks = 0;
  double median_seconds = 0.0;
  double blocks_per_second = 0.0;
};

std::vector<BenchRow> RunBench(const BenchOptions& options);

// a.blocks_per_second / b.blocks_per_second for rows found by name and size;
// 0 when either is missing.
double SpeedRatio(const std::vector<BenchRow>& rows, const std::string& a,
                  const std::string& b, size_t size);

}  // namespace jpegspace

#endif  // JPEGSPACE_BENCH_H_
