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

#include "smicqa/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "smicqa/error.hpp"

namespace smicqa {

ImagePlane::ImagePlane(std::size_t width, std::size_t height, std::size_t channels,
                       std::vector<double> values)
    : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
  if (channels_ != 1 && channels_ != 3) {
    throw PreconditionError("image must have 1 or 3 channels, got " + std::to_string(channels_));
  }
  if (width_ == 0 || height_ == 0) throw PreconditionError("image has zero size");
  if (values_.size() != width_ * height_ * channels_) {
    throw PreconditionError("image data size does not match its shape");
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw PreconditionError("image values must lie in [0, 1]");
  }
}

ImagePlane ImagePlane::luminance() const {
  if (channels_ == 1) return *this;
  std::vector<double> y(width_ * height_);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double* px = values_.data() + i * 3;
    y[i] = std::clamp(0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2], 0.0, 1.0);
  }
  return ImagePlane(width_, height_, 1, std::move(y));
}

ImagePlane load_image(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ImageIoError("image not found: " + path.string());
  }
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw ImageIoError("cannot decode image: " + path.string());

  double scale = 0.0;
  switch (mat.depth()) {
    case CV_8U: scale = 1.0 / 255.0; break;
    case CV_16U: scale = 1.0 / 65535.0; break;
    default: throw ImageIoError("unsupported sample depth in " + path.string());
  }
  const int src_channels = mat.channels();
  std::size_t channels = 0;
  // Decoder order is BGR(A); keep gray as gray.
  if (src_channels == 1 || src_channels == 2) {
    channels = 1;
  } else if (src_channels == 3 || src_channels == 4) {
    channels = 3;
  } else {
    throw ImageIoError("unsupported channel count in " + path.string());
  }
  const auto width = static_cast<std::size_t>(mat.cols);
  const auto height = static_cast<std::size_t>(mat.rows);
  std::vector<double> values(width * height * channels);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      double* out = values.data() + (y * width + x) * channels;
      for (std::size_t c = 0; c < channels; ++c) {
        const int src_c = channels == 3 ? static_cast<int>(2 - c) : 0;
        const double raw = mat.depth() == CV_8U
                               ? mat.ptr<std::uint8_t>(static_cast<int>(y))[x * src_channels + src_c]
                               : mat.ptr<std::uint16_t>(static_cast<int>(y))[x * src_channels + src_c];
        out[c] = raw * scale;
      }
    }
  }
  return ImagePlane(width, height, channels, std::move(values));
}

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
}

namespace {

void write_mat(const std::filesystem::path& path, const cv::Mat& mat) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), mat);
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw ImageIoError("cannot write " + path.string());
}

}  // namespace

void save_image(const std::filesystem::path& path, const ImagePlane& image) {
  const int type = image.channels() == 3 ? CV_8UC3 : CV_8UC1;
  cv::Mat mat(static_cast<int>(image.height()), static_cast<int>(image.width()), type);
  for (std::size_t y = 0; y < image.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(static_cast<int>(y));
    for (std::size_t x = 0; x < image.width(); ++x) {
      for (std::size_t c = 0; c < image.channels(); ++c) {
        const std::size_t dst_c = image.channels() == 3 ? 2 - c : 0;
        row[x * image.channels() + dst_c] = to_byte(image(y, x, c));
      }
    }
  }
  write_mat(path, mat);
}

void save_gray8(const std::filesystem::path& path, const Grid& grid) {
  if (grid.empty()) throw PreconditionError("cannot write an empty grid");
  cv::Mat mat(static_cast<int>(grid.rows()), static_cast<int>(grid.cols()), CV_8UC1);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    auto* row = mat.ptr<std::uint8_t>(static_cast<int>(r));
    for (std::size_t c = 0; c < grid.cols(); ++c) row[c] = to_byte(grid(r, c));
  }
  write_mat(path, mat);
}

}  // namespace smicqa
