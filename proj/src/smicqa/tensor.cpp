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

#include "smicqa/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "smicqa/error.hpp"

namespace smicqa {

Grid::Grid(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw PreconditionError("grid data size " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }
}

double Grid::mean() const {
  if (data_.empty()) return 0.0;
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

FeatureMap::FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
                       std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (data_.size() != height_ * width_ * channels_) {
    throw PreconditionError("feature data size does not match its shape");
  }
}

FeatureMap FeatureMap::crop(std::size_t y, std::size_t x, std::size_t patch_h,
                            std::size_t patch_w) const {
  if (y + patch_h > height_ || x + patch_w > width_) {
    throw PreconditionError("crop window exceeds feature map bounds");
  }
  FeatureMap out(patch_h, patch_w, channels_);
  for (std::size_t r = 0; r < patch_h; ++r) {
    const float* src = data_.data() + ((y + r) * width_ + x) * channels_;
    std::copy(src, src + patch_w * channels_, out.data_.data() + r * patch_w * channels_);
  }
  return out;
}

PatchGridShape patch_grid_shape(std::size_t height, std::size_t width, std::size_t patch,
                                std::size_t stride, int stage) {
  if (patch == 0 || stride == 0) {
    throw PreconditionError("patch size and stride must be positive");
  }
  if (height < patch || width < patch) {
    throw StageTooSmallError(stage, std::to_string(height) + "x" + std::to_string(width) +
                                        " is smaller than the " + std::to_string(patch) +
                                        "x" + std::to_string(patch) + " patch");
  }
  return {(height - patch) / stride + 1, (width - patch) / stride + 1};
}

std::vector<TileOrigin> extract_patch_grid(const FeatureMap& features, std::size_t patch,
                                           std::size_t stride, int stage) {
  const auto shape = patch_grid_shape(features.height(), features.width(), patch, stride, stage);
  std::vector<TileOrigin> tiles;
  tiles.reserve(shape.rows * shape.cols);
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) {
      tiles.push_back({r * stride, c * stride});
    }
  }
  return tiles;
}

}  // namespace smicqa
