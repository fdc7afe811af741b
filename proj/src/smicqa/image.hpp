// Copyright 2026 The smicqa Authors. All Rights Reserved.
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

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "smicqa/tensor.hpp"

namespace smicqa {

// Interleaved (y, x, channel) image with 1 or 3 channels and values in [0, 1].
// Three-channel images are RGB.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(std::size_t width, std::size_t height, std::size_t channels,
             std::vector<double> values);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t channels() const { return channels_; }

  double operator()(std::size_t y, std::size_t x, std::size_t c) const {
    return values_[(y * width_ + x) * channels_ + c];
  }
  std::span<const double> values() const { return values_; }

  bool same_shape(const ImagePlane& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  // Single-channel ITU-R BT.601 luma (Y = 0.299 R + 0.587 G + 0.114 B); a
  // grayscale image is returned as is.
  ImagePlane luminance() const;

  bool operator==(const ImagePlane&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> values_;
};

// Decodes PNG/BMP (and anything else the codec backend reads). 8-bit samples
// are divided by 255, 16-bit by 65535. Alpha is dropped.
ImagePlane load_image(const std::filesystem::path& path);

// 8-bit PNG/BMP writer (format from the extension); samples are rounded
// half-up from value * 255.
void save_image(const std::filesystem::path& path, const ImagePlane& image);

// Writes a [0, 1] grid as an 8-bit grayscale image, value * 255 rounded half-up.
void save_gray8(const std::filesystem::path& path, const Grid& grid);

// floor(v * 255 + 0.5) after clamping v to [0, 1].
unsigned char to_byte(double v);

}  // namespace smicqa
