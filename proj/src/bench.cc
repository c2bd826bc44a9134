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

#include "jpegspace/bench.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>

#include "jpegspace/error.h"
#include "jpegspace/jdr_ops.h"
#include "jpegspace/jpeg_linear.h"
#include "jpegspace/netspec.h"
#include "jpegspace/pixel_ops.h"

namespace jpegspace {

namespace {

// Each rep repeats `fn` until at least this long has passed, so fast
// operators are not dominated by clock resolution.
constexpr double kMinRepSeconds = 0.02;

volatile double g_sink = 0.0;

double MedianSeconds(size_t reps, const std::function<void()>& fn) {
  using Clock = std::chrono::steady_clock;
  fn();  // warm caches and lazily built bases
  std::vector<double> times;
  for (size_t r = 0; r < reps; ++r) {
    size_t calls = 0;
    const auto start = Clock::now();
    double elapsed = 0.0;
    do {
      fn();
      ++calls;
      elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    } while (elapsed < kMinRepSeconds);
    times.push_back(elapsed / static_cast<double>(calls));
  }
  std::sort(times.begin(), times.end());
  const size_t n = times.size();
  return n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

BenchRow Row(std::string name, size_t size, size_t reps, size_t blocks,
             const std::function<void()>& fn) {
  BenchRow row;
  row.name = std::move(name);
  row.size = size;
  row.reps = reps;
  row.blocks = blocks;
  row.median_seconds = MedianSeconds(reps, fn);
  row.blocks_per_second =
      row.median_seconds > 0.0 ? static_cast<double>(blocks) / row.median_seconds
                               : 0.0;
  return row;
}

}  // namespace

std::vector<BenchRow> RunBench(const BenchOptions& options) {
  if (options.reps == 0) throw Error(ErrorCode::kInvalidArgument, "reps >= 1");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const QuantizationMatrix ones;
  std::vector<BenchRow> rows;
  for (size_t size : options.sizes) {
    if (size == 0 || size % 8 != 0) {
      throw Error(ErrorCode::kInvalidArgument, "bench sizes are multiples of 8");
    }
    const size_t grid_blocks = (size / 8) * (size / 8);

    LabeledTensor pixels(
        {{"p", options.gap_channels}, {"h", size}, {"w", size}});
    for (double& v : pixels.mutable_data()) v = u(rng);
    const LabeledTensor coef = CompressBlockwise(pixels, ones);
    const size_t gap_blocks = options.gap_channels * grid_blocks;
    rows.push_back(Row("gap_pixel", size, options.reps, gap_blocks, [&] {
      g_sink = g_sink + GlobalAveragePoolPixel(pixels)[0];
    }));
    rows.push_back(Row("gap_jpeg", size, options.reps, gap_blocks, [&] {
      g_sink = g_sink + GapTransform(coef)[0];
    }));

    if (size > kMaxExplodedEdge) continue;

    // One 3x3 single-channel kernel; a build touches every basis block once.
    LabeledTensor kernel({{"out", 1}, {"in", 1}, {"kh", 3}, {"kw", 3}});
    for (double& v : kernel.mutable_data()) v = u(rng);
    const JpegMaps maps = ComposeJpeg(size, size, ones);
    rows.push_back(Row("build_naive", size, options.reps, grid_blocks, [&] {
      g_sink = g_sink + ExplodeConvNaive(kernel, maps).xi.data()[0];
    }));
    rows.push_back(Row("build_fast", size, options.reps, grid_blocks, [&] {
      g_sink = g_sink + ExplodeConvFast(kernel, maps).xi.data()[0];
    }));

    const NetworkSpec spec =
        MakeToyNetwork(options.net_channels, 10, size, size, options.seed);
    const JpegNetwork net = ConvertWeights(spec, ones);
    const LabeledTensor input = RandomInputs(spec, 1, options.seed)[0];
    const LabeledTensor input_coef = CompressBlockwise(input, ones);
    rows.push_back(Row("forward_pixel", size, options.reps, grid_blocks, [&] {
      g_sink = g_sink + ForwardPixel(spec, input)[0];
    }));
    rows.push_back(Row("forward_jpeg", size, options.reps, grid_blocks, [&] {
      g_sink = g_sink + ForwardJpeg(net, input_coef, kMaxReluFrequency)[0];
    }));
  }
  return rows;
}

double SpeedRatio(const std::vector<BenchRow>& rows, const std::string& a,
                  const std::string& b, size_t size) {
  const BenchRow* ra = nullptr;
  const BenchRow* rb = nullptr;
  for (const auto& r : rows) {
    if (r.size != size) continue;
    if (r.name == a) ra = &r;
    if (r.name == b) rb = &r;
  }
  if (ra == nullptr || rb == nullptr || rb->blocks_per_second <= 0.0) return 0.0;
  return ra->blocks_per_second / rb->blocks_per_second;
}

}  // namespace jpegspace
