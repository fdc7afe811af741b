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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "smicqa/backbone.hpp"
#include "smicqa/distortion.hpp"
#include "smicqa/image.hpp"
#include "smicqa/smic.hpp"
#include "smicqa/tensor.hpp"

namespace smicqa {

enum class Metric { psnr, ssim, lpips };

std::string to_string(Metric metric);
// Accepts "psnr", "ssim", "lpips" (and "lpips_style").
Metric parse_metric(const std::string& name);

struct StageRange {
  int m = 3;
  int n = 4;

  int count() const { return n - m + 1; }
  bool contains(int s) const { return s >= m && s <= n; }
  // Throws PreconditionError unless 1 <= m <= n <= 5.
  void validate() const;
  bool operator==(const StageRange&) const = default;
};

// "m:n" or a single stage "s".
StageRange parse_stage_range(const std::string& text);

struct StageTerm {
  int stage = 0;
  double value = 0.0;
  // true when the stage went through the attention-weighted branch.
  bool weighted = false;
};

struct QualityScore {
  // PSNR: (weighted) MSE. SSIM: (weighted) map mean. LPIPS: stage sum.
  double value = 0.0;
  std::optional<double> db;  // PSNR only
  Metric metric = Metric::psnr;
  bool smic_enabled = false;
  std::vector<StageTerm> per_stage_terms;
};

inline constexpr double kDbCap = 100.0;
inline constexpr double kDbFloorMse = 1e-10;

// 10 log10(1 / mse) with peak 1, capped at 100 dB below 1e-10.
double psnr_db(double mse);

// Bilinear resampling with corner-aligned sample positions: output index i
// reads source position i * (src - 1) / (dst - 1), and a 1-wide target reads
// position 0.
Grid resize_bilinear(const Grid& map, std::size_t target_rows, std::size_t target_cols);

// f(mean_s R_s(A_s) * M^d) for a pixel-domain map. `attentions` must hold
// exactly stages m..n.
QualityScore score_traditional(Metric metric, const DistortionMap& distortion,
                               std::span<const smic::AttentionMap> attentions, StageRange range);

// Stage-weighted deep score: the attention-weighted stage means in [m, n] are
// averaged, every other stage adds its plain map mean. `distortions` must
// hold all five stages.
QualityScore score_deep(Metric metric, std::span<const DistortionMap> distortions,
                        std::span<const smic::AttentionMap> attentions, StageRange range);

struct ScoreConfig {
  Metric metric = Metric::psnr;
  bool smic = true;
  std::uint64_t seed = 0;
  std::size_t k = smic::kDefaultSlices;
  StageRange stages;
  smic::ProjectionMode projection = smic::ProjectionMode::shared;
  bool normalize = true;
  std::size_t patch = smic::kDefaultPatch;
  std::size_t deep_stride = smic::kDefaultPatch;
  std::size_t traditional_stride = 1;
  double bound_exponent = mic::kDefaultBoundExponent;
  // Debug: replace every attention map with ones.
  bool force_unit_attention = false;
  bool resample_per_patch = false;

  void validate() const;
};

// Per-pair cache of features and attention maps so several metric
// configurations can share the expensive parts. Not thread-safe; use one per
// pair per thread.
class PairContext {
 public:
  // `backbone` may be null when only baseline pixel metrics are requested.
  PairContext(ImagePlane ref, ImagePlane dist, std::shared_ptr<const Backbone> backbone);

  const ImagePlane& ref() const { return ref_; }
  const ImagePlane& dist() const { return dist_; }
  const FeatureStack& ref_features();
  const FeatureStack& dist_features();

  // Attention map of one stage at the given stride, using config's SMIC
  // parameters.
  const smic::AttentionMap& attention(const ScoreConfig& config, int stage, std::size_t stride);

  // Distortion map of one deep stage. Stages inside the configured range use
  // the configured patch; the others shrink the patch to fit small stages.
  const DistortionMap& deep_distortion(const ScoreConfig& config, int stage);

 private:
  using AttentionKey = std::tuple<int, std::size_t, std::size_t, std::uint64_t, std::size_t, int,
                                  double, bool>;
  using DeepKey = std::tuple<int, std::size_t, std::size_t, bool>;

  ImagePlane ref_;
  ImagePlane dist_;
  std::shared_ptr<const Backbone> backbone_;
  std::optional<FeatureStack> ref_features_;
  std::optional<FeatureStack> dist_features_;
  std::map<AttentionKey, smic::AttentionMap> attention_;
  std::map<DeepKey, DistortionMap> deep_;
};

// Patch actually used for a deep stage: the configured patch when it fits,
// else min(height, width) of the stage (stages outside [m, n] only).
std::size_t deep_patch_for_stage(const FeatureMap& features, std::size_t patch);

QualityScore score_pair(const ScoreConfig& config, PairContext& context);

QualityScore score_pair(const ScoreConfig& config, const ImagePlane& ref, const ImagePlane& dist,
                        std::shared_ptr<const Backbone> backbone);

}  // namespace smicqa
