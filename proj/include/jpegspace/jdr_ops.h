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

// Network operators that act on DCT coefficients directly.
//
// Feature grids have axes [p, x, y, k]: channel, block row, block column,
// zig-zag coefficient. All operators expect dequantised coefficients in the
// scale of the J map they were built with.

#ifndef JPEGSPACE_JDR_OPS_H_
#define JPEGSPACE_JDR_OPS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jpegspace/jpeg_linear.h"
#include "jpegspace/pixel_ops.h"
#include "jpegspace/tensor.h"

namespace jpegspace {

enum class ConvBuilder { kNaive, kFast, kFactored };

// Largest image edge for which the exploded tensor is materialised.
inline constexpr size_t kMaxExplodedEdge = 32;

// A pixel-domain convolution carried into the coefficient domain,
// Xi = J C J~.
struct CompressedConv {
  // [p', x', y', k', p, x, y, k]; empty when built_by == kFactored.
  LabeledTensor xi;
  // [out, in, kh, kw]
  LabeledTensor kernel;
  std::vector<double> bias;
  QuantizationMatrix q;
  size_t height = 0;
  size_t width = 0;
  ConvBuilder built_by = ConvBuilder::kFast;

  // f[..., p, x, y, k] -> [..., p, x, y, k]. The factored form accepts
  // [p, x, y, k] only.
  LabeledTensor Apply(const LabeledTensor& f) const;
};

// Expands every kernel slice into a full [h', w', h, w] map, stacks them
// into C[p', h', w', p, h, w] and contracts J C J~.
CompressedConv ExplodeConvNaive(const LabeledTensor& kernel,
                                const JpegMaps& maps);
// Folds (x, y, k) of J~ into one batch axis, convolves each basis image with
// each kernel slice and contracts the results with J.
CompressedConv ExplodeConvFast(const LabeledTensor& kernel,
                               const JpegMaps& maps);
// Keeps Xi implicit: J~, pixel convolution, J, evaluated blockwise.
CompressedConv FactoredConv(const LabeledTensor& kernel,
                            const QuantizationMatrix& q, size_t height,
                            size_t width);

// Psi [k, m, n, k']: coefficients k, spatial mask (m, n), output k'.
// Psi(F, G) = DCT(G * IDCT(F)) per 8x8 block.
struct MaskMap {
  LabeledTensor psi;
};

// Built once; safe for concurrent use.
const MaskMap& GetMaskMap();

// Per-block spatial masking through Psi. mask[..., x, y, m, n] with the
// same leading axes as f[..., x, y, k].
LabeledTensor ApplyMask(const MaskMap& map, const LabeledTensor& f,
                        const LabeledTensor& mask);

enum class ReluVariant { kAsm, kNaive };

inline constexpr int kMaxReluFrequency = 14;

// Number of (i, j) with i + j <= m.
size_t FrequencyCount(int m);

// ReLU on coefficients f[..., k] (k must be the last axis, 64 long).
// p_m is the block rebuilt from frequencies i + j <= m.
//   kAsm:   DCT(H(p_m) * IDCT(f)) via Psi, H(0) = 1
//   kNaive: DCT(max(p_m, 0))
LabeledTensor AsmRelu(const LabeledTensor& f, int m, ReluVariant variant,
                      const MaskMap& psi = GetMaskMap());

// Per-channel block statistics from coefficients: mean = average DC / 8 and
// variance = mean square of the coefficients once the channel mean is
// removed from every DC term.
ChannelStatistics CoefficientStatistics(const LabeledTensor& f, bool bessel);

// Batch norm on coefficients. The mean is subtracted through DC, every
// coefficient is scaled by gamma / sqrt(var + eps), and beta is added to DC
// as 8 beta.
LabeledTensor BnTransform(const LabeledTensor& f, const BnParams& params,
                          BnMode mode);

// Channel means: average over blocks of DC / 8.
std::vector<double> GapTransform(const LabeledTensor& f);

struct ReluSweepRow {
  int m = 0;
  double rmse_asm = 0.0;
  double rmse_naive = 0.0;
};

// RMSE of both approximations against the exact ReLU, m = 1..14, over
// `blocks` 8x8 blocks made by nearest-neighbour 2x upsampling of 4x4 blocks
// drawn uniformly from [-1, 1].
std::vector<ReluSweepRow> ReluSweep(size_t blocks, uint64_t seed);

}  // namespace jpegspace

#endif  // JPEGSPACE_JDR_OPS_H_
