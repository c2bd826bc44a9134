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

// 8-bit interleaved images and binary PGM/PPM IO.

#ifndef JPEGSPACE_IMAGE_IO_H_
#define JPEGSPACE_IMAGE_IO_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jpegspace {

struct Image {
  size_t height = 0;
  size_t width = 0;
  size_t channels = 1;  // 1 (gray) or 3 (RGB)
  std::vector<uint8_t> samples;

  Image() = default;
  Image(size_t h, size_t w, size_t c)
      : height(h), width(w), channels(c), samples(h * w * c, 0) {}

  uint8_t& at(size_t row, size_t col, size_t c = 0) {
    return samples[(row * width + col) * channels + c];
  }
  uint8_t at(size_t row, size_t col, size_t c = 0) const {
    return samples[(row * width + col) * channels + c];
  }
  bool operator==(const Image& other) const = default;
};

// P5 (gray) and P6 (RGB), maxval 255.
Image ParsePnm(std::span<const uint8_t> bytes);
std::vector<uint8_t> SerializePnm(const Image& image);

std::vector<uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes);

Image ReadPnm(const std::string& path);
void WritePnm(const std::string& path, const Image& image);

}  // namespace jpegspace

#endif  // JPEGSPACE_IMAGE_IO_H_
