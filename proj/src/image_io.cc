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

#include "jpegspace/image_io.h"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "jpegspace/error.h"

namespace jpegspace {

namespace {

class PnmTokenizer {
 public:
  explicit PnmTokenizer(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  size_t NextNumber() {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedStream, "PNM header: expected number");
    }
    size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1u << 24)) {
        throw Error(ErrorCode::kMalformedStream, "PNM header: value too large");
      }
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  size_t RasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kMalformedStream, "PNM header: missing separator");
    }
    return pos_ + 1;
  }

 private:
  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 2;
};

}  // namespace

Image ParsePnm(std::span<const uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw Error(ErrorCode::kUnsupportedFeature,
                "only binary PGM (P5) and PPM (P6) are supported");
  }
  const size_t channels = bytes[1] == '5' ? 1 : 3;
  PnmTokenizer tokens(bytes);
  const size_t width = tokens.NextNumber();
  const size_t height = tokens.NextNumber();
  const size_t maxval = tokens.NextNumber();
  if (maxval != 255) {
    throw Error(ErrorCode::kUnsupportedFeature, "PNM maxval must be 255");
  }
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::kMalformedStream, "PNM image is empty");
  }
  const size_t start = tokens.RasterStart();
  const size_t count = width * height * channels;
  if (bytes.size() < start + count) {
    throw Error(ErrorCode::kTruncatedStream, "truncated stream: PNM raster");
  }
  Image image(height, width, channels);
  std::copy(bytes.begin() + start, bytes.begin() + start + count,
            image.samples.begin());
  return image;
}

std::vector<uint8_t> SerializePnm(const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PNM needs 1 or 3 channels");
  }
  const std::string header = std::string(image.channels == 1 ? "P5" : "P6") +
                             "\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.samples.begin(), image.samples.end());
  return out;
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

Image ReadPnm(const std::string& path) { return ParsePnm(ReadFileBytes(path)); }

void WritePnm(const std::string& path, const Image& image) {
  WriteFileBytes(path, SerializePnm(image));
}

}  // namespace jpegspace
