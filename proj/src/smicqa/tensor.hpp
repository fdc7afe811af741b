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
#include <span>
#include <vector>

namespace smicqa {

// Dense row-major 2-D grid of doubles. Used for distortion, attention and
// SMIC maps.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Grid(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double mean() const;

  bool operator==(const Grid&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Height x width x channels feature tensor, channel-last and contiguous.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels, float fill = 0.0f)
      : height_(height), width_(width), channels_(channels),
        data_(height * width * channels, fill) {}
  FeatureMap(std::size_t height, std::size_t width, std::size_t channels,
             std::vector<float> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }

  float& operator()(std::size_t y, std::size_t x, std::size_t c) {
    return data_[(y * width_ + x) * channels_ + c];
  }
  float operator()(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * width_ + x) * channels_ + c];
  }

  // Channel vector of one spatial site.
  std::span<const float> site(std::size_t y, std::size_t x) const {
    return {data_.data() + (y * width_ + x) * channels_, channels_};
  }
  std::span<float> site(std::size_t y, std::size_t x) {
    return {data_.data() + (y * width_ + x) * channels_, channels_};
  }

  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  bool same_shape(const FeatureMap& other) const {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  // Copy of the patch_h x patch_w window whose top-left corner is (y, x).
  FeatureMap crop(std::size_t y, std::size_t x, std::size_t patch_h, std::size_t patch_w) const;

  bool operator==(const FeatureMap&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<float> data_;
};

struct TileOrigin {
  std::size_t row;
  std::size_t col;
  bool operator==(const TileOrigin&) const = default;
};

struct PatchGridShape {
  std::size_t rows;
  std::size_t cols;
};

// Tiles per axis: floor((dim - patch) / stride) + 1. Throws StageTooSmallError
// (tagged with `stage`) when either dimension is below the patch size.
PatchGridShape patch_grid_shape(std::size_t height, std::size_t width, std::size_t patch,
                                std::size_t stride, int stage = 0);

// Row-major top-left coordinates of every full tile. Shared by the distortion
// and attention maps so their grids align one-to-one; border remainders are
// dropped.
std::vector<TileOrigin> extract_patch_grid(const FeatureMap& features, std::size_t patch,
                                           std::size_t stride, int stage = 0);

}  // namespace smicqa
