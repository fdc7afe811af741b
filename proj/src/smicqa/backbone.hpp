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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "smicqa/image.hpp"
#include "smicqa/tensor.hpp"

namespace smicqa {

inline constexpr int kStageCount = 5;
inline constexpr std::size_t kMinImageSide = 32;
inline constexpr std::size_t kProbeSide = 224;

enum class BackboneSource { pretrained, synthetic };

struct Preprocessing {
  std::array<double, 3> mean{0.485, 0.456, 0.406};
  std::array<double, 3> std{0.229, 0.224, 0.225};
};

// Post-activation features at the five stage taps, shallow to deep.
struct FeatureStack {
  std::array<FeatureMap, kStageCount> stages;
  BackboneSource source = BackboneSource::synthetic;
  Preprocessing preprocessing;

  // 1-based stage index.
  const FeatureMap& stage(int s) const { return stages.at(static_cast<std::size_t>(s - 1)); }
};

struct BackboneConfig {
  std::filesystem::path model_path;
  // Last activation of each convolutional block, ordered by depth.
  std::array<std::string, kStageCount> stage_taps{"relu1_2", "relu2_2", "relu3_3", "relu4_3",
                                                  "relu5_3"};
  Preprocessing preprocessing;
};

// Reads a [backbone] table:
//   model_path = "vgg16.onnx"   # relative paths resolve against the file
//   stage_taps = ["relu1_2", "relu2_2", "relu3_3", "relu4_3", "relu5_3"]
//   input_mean = [0.485, 0.456, 0.406]
//   input_std  = [0.229, 0.224, 0.225]
// Missing keys keep their defaults. SMICQA_MODEL_PATH, when set, replaces
// model_path.
BackboneConfig load_backbone_config(const std::filesystem::path& toml_path);

// Applies the SMICQA_MODEL_PATH override, if present.
void apply_environment(BackboneConfig& config);

class Backbone {
 public:
  virtual ~Backbone() = default;

  // Runs preprocessing and inference. Thread-safe.
  virtual FeatureStack extract(const ImagePlane& image) const = 0;

  virtual BackboneSource source() const = 0;
  // Cumulative spatial stride of each tap relative to the input.
  virtual std::array<std::size_t, kStageCount> stage_strides() const = 0;
  virtual std::array<std::size_t, kStageCount> stage_channels() const = 0;
  virtual const Preprocessing& preprocessing() const = 0;
};

// Loads an ONNX model and validates the five taps on a 224x224 probe input.
// Throws BackboneError (missing_file, load_failed, missing_tap, probe_failed).
std::shared_ptr<const Backbone> load_backbone(const BackboneConfig& config);

// Seeded random conv + 2x max-pool stack with the same tap contract as the
// pretrained model: stage s has channel_plan[s-1] channels at stride 2^(s-1).
std::shared_ptr<const Backbone> synthetic_backbone(
    std::uint64_t seed, const std::array<std::size_t, kStageCount>& channel_plan);

inline constexpr std::array<std::size_t, kStageCount> kDefaultSyntheticPlan{8, 16, 32, 64, 64};

// Checks the image is at least 32x32, then extracts.
FeatureStack extract_stage_features(const Backbone& backbone, const ImagePlane& image);

}  // namespace smicqa
