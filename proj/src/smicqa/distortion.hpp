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
#include <optional>

#include "smicqa/image.hpp"
#include "smicqa/tensor.hpp"

namespace smicqa {

enum class MapKind { psnr, ssim, deep };

struct DistortionMap {
  MapKind kind = MapKind::psnr;
  std::optional<int> stage;  // deep maps only
  Grid values;

  double mean() const { return values.mean(); }
};

// Per-pixel squared error averaged over channels; its mean is the MSE.
DistortionMap psnr_error_map(const ImagePlane& ref, const ImagePlane& dist);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

// SSIM index map on BT.601 luma with an 11x11 Gaussian window (sigma 1.5),
// evaluated at every position where the window fits, so the map is
// (H - 10) x (W - 10). Its mean is the scalar SSIM.
DistortionMap ssim_local_map(const ImagePlane& ref, const ImagePlane& dist);

struct DeepMapOptions {
  std::size_t patch = 7;
  std::size_t stride = 7;
  // Scale each site's channel vector to unit L2 norm before differencing.
  bool normalize = true;
};

// Per tile: ||F_ref - F_dist||^2 summed over the tile, divided by the tile's
// site count. Tiling matches attention_map_for_stage.
DistortionMap deep_distortion_map(const FeatureMap& ref_features, const FeatureMap& dist_features,
                                  int stage, const DeepMapOptions& options = {});

// Site-wise unit normalisation, x / (||x|| + 1e-10).
FeatureMap normalize_channels(const FeatureMap& features);

}  // namespace smicqa
