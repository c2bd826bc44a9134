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

// Binary sidecar files for tensors, quantised coefficients and network
// specs. All integers and doubles are little-endian; see docs/formats.md.

#ifndef JPEGSPACE_SIDECAR_H_
#define JPEGSPACE_SIDECAR_H_

#include <cstdint>
#include <span>
#include <vector>

#include "jpegspace/jpeg_codec.h"
#include "jpegspace/netspec.h"
#include "jpegspace/tensor.h"

namespace jpegspace {

inline constexpr uint32_t kSidecarVersion = 1;

std::vector<uint8_t> SerializeTensor(const LabeledTensor& t);
LabeledTensor ParseTensor(std::span<const uint8_t> bytes);

std::vector<uint8_t> SerializeCoefficients(const JpegData& data);
JpegData ParseCoefficients(std::span<const uint8_t> bytes);

std::vector<uint8_t> SerializeNetwork(const NetworkSpec& spec);
NetworkSpec ParseNetwork(std::span<const uint8_t> bytes);

}  // namespace jpegspace

#endif  // JPEGSPACE_SIDECAR_H_
