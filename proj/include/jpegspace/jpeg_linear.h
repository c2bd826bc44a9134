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

// JPEG compression as a chain of multilinear maps, J = B D Z S, and the
// decompression map J~ = B D Z S~, plus a few pixel-domain linear maps.
//
// Axis labels:
//   h, w     pixel row / column
//   x, y     block row / column
//   i, j     offset inside a block
//   a, b     DCT frequency (vertical, horizontal)
//   z        zig-zag index before scaling
//   k        zig-zag index after scaling (the coefficient axis)
//
// Both J and J~ are stored with axes [x, y, k, h, w]. J is applied by
// contracting over (h, w), J~ by contracting over (x, y, k). Centring by
// 128 and rounding are not part of either map.

#ifndef JPEGSPACE_JPEG_LINEAR_H_
#define JPEGSPACE_JPEG_LINEAR_H_

#include <cstddef>
#include <string>
#include <vector>

#include "jpegspace/jpeg_codec.h"
#include "jpegspace/tensor.h"

namespace jpegspace {

enum class MapKind {
  kBlockify,
  kDct,
  kZigzag,
  kScale,
  kScaleInverse,
  kCompress,
  kDecompress,
};

const char* MapKindName(MapKind kind);

struct LinearJpegMap {
  LabeledTensor tensor;
  MapKind kind = MapKind::kCompress;
  // Image size for maps that depend on it; 0 otherwise.
  size_t height = 0;
  size_t width = 0;
  QuantizationMatrix q;
  // Factors in composition order, e.g. {B, D, Z, S} for J.
  std::vector<MapKind> factors;
};

// Largest image edge for which J and J~ are materialised densely.
inline constexpr size_t kMaxDenseEdge = 64;

// B [x, y, i, j, h, w]: 1 iff pixel (h, w) is offset (i, j) of block (x, y).
LinearJpegMap BuildBlockify(size_t height, size_t width);
// D [a, b, i, j]: the 8x8 orthonormal DCT-II.
LinearJpegMap BuildDctMap();
// Z [z, a, b]: 1 iff (a, b) is zig-zag position z.
LinearJpegMap BuildZigzagMap();
// S [k, z] = delta(k, z) / q_k and S~ [k, z] = delta(k, z) q_k.
LinearJpegMap BuildScaleMap(const QuantizationMatrix& q);
LinearJpegMap BuildScaleInverseMap(const QuantizationMatrix& q);

struct JpegMaps {
  LinearJpegMap compress;    // J
  LinearJpegMap decompress;  // J~
};

// Composes J and J~ by contracting the factor tensors. Height and width must
// be multiples of 8 and at most kMaxDenseEdge.
JpegMaps ComposeJpeg(size_t height, size_t width, const QuantizationMatrix& q);

// image[..., h, w] -> coefficients[..., x, y, k]; leading axes pass through.
LabeledTensor ApplyCompress(const LinearJpegMap& j, const LabeledTensor& image);
// coefficients[..., x, y, k] -> image[..., h, w].
LabeledTensor ApplyDecompress(const LinearJpegMap& j_tilde,
                              const LabeledTensor& coefficients);

// The same two maps evaluated block by block without materialising them.
// Works for any size that is a multiple of 8; leading axes pass through.
LabeledTensor CompressBlockwise(const LabeledTensor& image,
                                const QuantizationMatrix& q);
LabeledTensor DecompressBlockwise(const LabeledTensor& coefficients,
                                  const QuantizationMatrix& q);

// Pixel-domain maps. Each has output axes [u, v] (or [u, v] with the input
// colour axis c contracted) followed by input axes; ApplyPixelMap contracts
// the input axes and renames u, v back to h, w.
//
// 3x3 smoothing with weight 1/2 at the centre and 1/8 on the four edge
// neighbours. Out-of-image neighbours are replaced by the nearest edge
// sample, so constants are preserved at the border too.
LabeledTensor BuildGaussian3x3Map(size_t height, size_t width);
// [u, v, c, h, w] with c = 3 (R, G, B): Y = 0.299 R + 0.587 G + 0.114 B.
LabeledTensor BuildGrayscaleMap(size_t height, size_t width);
// Nearest-neighbour resampling by 2. Downsampling keeps pixel (2u, 2v).
LabeledTensor BuildDownsample2Map(size_t height, size_t width);
LabeledTensor BuildUpsample2Map(size_t height, size_t width);
// Cross-correlation with kernel[kh, kw] (odd extents), zero padding,
// output the same size as the input.
LabeledTensor BuildConvMap(const LabeledTensor& kernel, size_t height,
                           size_t width);

LabeledTensor ApplyPixelMap(const LabeledTensor& map, const LabeledTensor& image);

}  // namespace jpegspace

#endif  // JPEGSPACE_JPEG_LINEAR_H_
