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
#include <cstdint>
#include <span>
#include <vector>

#include "smicqa/mic.hpp"
#include "smicqa/tensor.hpp"

namespace smicqa::smic {

inline constexpr std::size_t kDefaultSlices = 32;
inline constexpr std::size_t kDefaultPatch = 7;

// shared: the same vector projects both feature stacks (one depth-wise
// convolution applied to reference and distorted features).
// independent: reference and distorted slices use separate draws.
enum class ProjectionMode { shared, independent };

// K seeded standard-Gaussian channel projections. Immutable once sampled.
class ProjectionBank {
 public:
  // Slice i is drawn as theta_i followed (independent mode only) by phi_i, so
  // a bank with more slices extends a smaller one with the same seed.
  static ProjectionBank sample(std::size_t channels, std::size_t k, std::uint64_t seed,
                               ProjectionMode mode);

  std::size_t k() const { return k_; }
  std::size_t channels() const { return channels_; }
  std::uint64_t seed() const { return seed_; }
  ProjectionMode mode() const { return mode_; }

  std::span<const double> theta(std::size_t i) const {
    return {theta_.data() + i * channels_, channels_};
  }
  std::span<const double> phi(std::size_t i) const {
    return {phi_.data() + i * channels_, channels_};
  }

  bool operator==(const ProjectionBank&) const = default;

 private:
  ProjectionBank() = default;

  std::size_t k_ = 0;
  std::size_t channels_ = 0;
  std::uint64_t seed_ = 0;
  ProjectionMode mode_ = ProjectionMode::shared;
  std::vector<double> theta_;
  std::vector<double> phi_;
};

// One scalar per spatial site, row-major: out[y * W + x] = <patch(y, x, :), vector>.
std::vector<double> project_patch(const FeatureMap& patch, std::span<const double> vector);

struct FeaturePatchPair {
  FeatureMap ref_patch;
  FeatureMap dist_patch;
  int stage = 0;
};

struct MicConfig {
  double bound_exponent = mic::kDefaultBoundExponent;
};

// Monte-Carlo sliced MIC: mean over the bank's slices of
// approx_mic(<ref, theta_i>, <dist, phi_i>).
double smic_patch(const FeaturePatchPair& pair, const ProjectionBank& bank,
                  const MicConfig& config = {});

struct AttentionMap {
  int stage = 0;
  Grid values;  // patch-grid resolution, entries in [0, 1]
};

struct AttentionOptions {
  std::size_t patch = kDefaultPatch;
  std::size_t stride = kDefaultPatch;
  MicConfig mic;
  // Draw a fresh bank per tile (seeded from the bank seed and the tile index)
  // instead of reusing the stage bank.
  bool resample_per_patch = false;
};

// Attention = 1 - SMIC for every full patch tile of the stage.
AttentionMap attention_map_for_stage(const FeatureMap& ref_features,
                                     const FeatureMap& dist_features, const ProjectionBank& bank,
                                     int stage, const AttentionOptions& options = {});

// Seed used for tile `tile_index` when resample_per_patch is on.
std::uint64_t tile_seed(std::uint64_t seed, std::size_t tile_index);

}  // namespace smicqa::smic
