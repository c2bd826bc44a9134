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

// Baseline JFIF: sequential DCT, Huffman coded, 8-bit samples, one or three
// components at 4:4:4 or 4:2:0.

#ifndef JPEGSPACE_JFIF_H_
#define JPEGSPACE_JFIF_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "jpegspace/jpeg_codec.h"

namespace jpegspace {

// A DHT table: code counts per length 1..16 and symbols in code order.
struct HuffmanSpec {
  std::array<uint8_t, 16> counts{};
  std::vector<uint8_t> symbols;
};

// Annex K example tables (the libjpeg defaults).
const HuffmanSpec& DefaultDcLuma();
const HuffmanSpec& DefaultAcLuma();
const HuffmanSpec& DefaultDcChroma();
const HuffmanSpec& DefaultAcChroma();

// Writes SOI APP0 DQT SOF0 DHT SOS <scan> EOI using the default tables.
// Components must already be padded to the MCU grid.
std::vector<uint8_t> JfifSerialize(const JpegData& data);

// Errors: kUnsupportedFeature for progressive / lossless / arithmetic
// frames, DAC and nonzero restart intervals; kTruncatedStream when the
// stream ends early or lacks EOI; kMalformedStream for syntax errors.
JpegData JfifParse(std::span<const uint8_t> stream);

}  // namespace jpegspace

#endif  // JPEGSPACE_JFIF_H_
