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

// The procedural baseline JPEG pipeline: colour conversion, padding and
// chroma subsampling, blockwise DCT with zig-zag flattening, quantisation,
// run-length coding, and end-to-end encode/decode.
//
// Axis conventions shared with jpeg_linear and jdr_ops:
//   planes          [h, w]       row-major samples
//   coefficients    [x, y, k]    x = block row, y = block column,
//                                k = zig-zag index in [0, 64)

#ifndef JPEGSPACE_JPEG_CODEC_H_
#define JPEGSPACE_JPEG_CODEC_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jpegspace/image_io.h"
#include "jpegspace/tensor.h"

namespace jpegspace {

inline constexpr size_t kBlockSize = 8;
inline constexpr size_t kBlockArea = 64;

enum class PlaneKind { kLuma, kChroma };
enum class Subsampling { k444, k420 };

// Zig-zag index k -> natural (row * 8 + col) index, and back.
const std::array<uint8_t, kBlockArea>& ZigzagToNatural();
const std::array<uint8_t, kBlockArea>& NaturalToZigzag();

class QuantizationMatrix {
 public:
  // All ones.
  QuantizationMatrix();
  // Entries must lie in [1, 255].
  static QuantizationMatrix FromZigzag(const std::array<int, kBlockArea>& q);
  static QuantizationMatrix FromNatural(const std::array<int, kBlockArea>& q);

  int zigzag(size_t k) const { return zigzag_[k]; }
  int natural(size_t row, size_t col) const;
  const std::array<int, kBlockArea>& zigzag_values() const { return zigzag_; }
  std::array<int, kBlockArea> natural_values() const;

  bool operator==(const QuantizationMatrix& other) const = default;

 private:
  std::array<int, kBlockArea> zigzag_;
};

// libjpeg's linear quality scaling of the Annex K example tables.
QuantizationMatrix QualityToMatrix(int quality, PlaneKind kind);

// Planes of real samples in [0, 255]; 1 plane (gray) or 3 (Y, Cb, Cr).
struct PlanarImage {
  std::vector<LabeledTensor> planes;
  Subsampling subsampling = Subsampling::k444;
  // Size of the image before padding.
  size_t height = 0;
  size_t width = 0;
};

// Full-range YCbCr. Gray images pass through as a single plane.
PlanarImage RgbToYcbcr(const Image& image);
// Rounds and clamps to [0, 255]. Planes must share one extent (no
// subsampling left).
Image YcbcrToRgb(const PlanarImage& image);

// Minimum coded unit edge in luma samples.
size_t McuSize(Subsampling mode, size_t plane_count);

// Pads every plane by edge replication to the MCU grid, then halves chroma
// with a 2x2 box mean under 4:2:0.
PlanarImage PadAndSubsample(const PlanarImage& image, Subsampling mode);

struct CoefficientGrid {
  size_t plane = 0;
  // [x, y, k]
  LabeledTensor blocks;
  bool quantized = false;

  size_t block_rows() const { return blocks.Extent("x"); }
  size_t block_cols() const { return blocks.Extent("y"); }
};

// plane[h, w] with extents divisible by 8 -> centred DCT coefficients.
CoefficientGrid ForwardBlocks(const LabeledTensor& plane, size_t plane_id = 0);
// Inverse DCT and un-centring; the grid must be dequantised.
LabeledTensor InverseBlocks(const CoefficientGrid& grid);
// Fixed-point inverse DCT (13-bit constants, 2 extra bits between passes)
// producing clamped 8-bit samples. Matches the IJG "islow" decoder bit for
// bit; within 1 of rounding InverseBlocks for in-range coefficients.
LabeledTensor InverseBlocksInteger(const CoefficientGrid& grid);

// Rounds half away from zero. Coefficients are clamped to the range the
// baseline entropy coder can represent: DC to +-2047, AC to +-1023.
CoefficientGrid Quantize(const CoefficientGrid& grid,
                         const QuantizationMatrix& q);
CoefficientGrid Dequantize(const CoefficientGrid& grid,
                           const QuantizationMatrix& q);

// A run of zeros followed by a nonzero value. {0, 0} ends the block.
struct RunValue {
  int run = 0;
  int value = 0;

  bool operator==(const RunValue& other) const = default;
  bool is_end_of_block() const { return run == 0 && value == 0; }
};

std::vector<RunValue> RleEncode(std::span<const int> block);
// Throws kMalformedStream on overlong runs, zero values or a missing
// end-of-block.
std::array<int, kBlockArea> RleDecode(std::span<const RunValue> pairs);

// Quantised coefficients plus everything the container records.
struct JpegData {
  size_t height = 0;
  size_t width = 0;
  Subsampling subsampling = Subsampling::k444;
  // One grid per component, quantised, padded to the MCU grid.
  std::vector<CoefficientGrid> components;
  // Table used by each component.
  std::vector<QuantizationMatrix> quantization;
};

enum class ChromaUpsampling { kBilinear, kNearest };

// Pixels -> quantised coefficients.
JpegData Compress(const Image& image, int quality, Subsampling mode);
// Quantised coefficients -> pixels.
Image Decompress(const JpegData& data,
                 ChromaUpsampling upsampling = ChromaUpsampling::kBilinear);

// Compress followed by JFIF serialisation, and the converse.
std::vector<uint8_t> Encode(const Image& image, int quality,
                            Subsampling mode);
Image Decode(std::span<const uint8_t> stream,
             ChromaUpsampling upsampling = ChromaUpsampling::kBilinear);

// Peak signal-to-noise ratio in dB over all samples; +inf when identical.
double Psnr(const Image& a, const Image& b);

}  // namespace jpegspace

#endif  // JPEGSPACE_JPEG_CODEC_H_
