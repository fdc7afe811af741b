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

#include "smicqa/scoring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "smicqa/error.hpp"

namespace smicqa {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::psnr: return "psnr";
    case Metric::ssim: return "ssim";
    case Metric::lpips: return "lpips";
  }
  return "unknown";
}

Metric parse_metric(const std::string& name) {
  if (name == "psnr") return Metric::psnr;
  if (name == "ssim") return Metric::ssim;
  if (name == "lpips" || name == "lpips_style") return Metric::lpips;
  throw PreconditionError("unknown metric '" + name + "' (expected psnr, ssim or lpips)");
}

void StageRange::validate() const {
  if (!(1 <= m && m <= n && n <= kStageCount)) {
    throw PreconditionError("stage range " + std::to_string(m) + ":" + std::to_string(n) +
                            " must satisfy 1 <= m <= n <= 5");
  }
}

StageRange parse_stage_range(const std::string& text) {
  auto parse_int = [&](std::string_view part) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
      throw PreconditionError("malformed stage range '" + text + "' (expected m:n)");
    }
    return v;
  };
  const auto colon = text.find(':');
  StageRange range;
  if (colon == std::string::npos) {
    range.m = range.n = parse_int(text);
  } else {
    const std::string_view view(text);
    range.m = parse_int(view.substr(0, colon));
    range.n = parse_int(view.substr(colon + 1));
  }
  range.validate();
  return range;
}

double psnr_db(double mse) {
  if (mse < kDbFloorMse) return kDbCap;
  return std::min(kDbCap, 10.0 * std::log10(1.0 / mse));
}

Grid resize_bilinear(const Grid& map, std::size_t target_rows, std::size_t target_cols) {
  if (map.empty()) throw PreconditionError("cannot resize an empty grid");
  if (target_rows == 0 || target_cols == 0) throw PreconditionError("resize target must be non-empty");
  if (target_rows == map.rows() && target_cols == map.cols()) return map;

  auto axis = [](std::size_t src, std::size_t dst) {
    // (lower index, weight of upper index) per output position.
    std::vector<std::pair<std::size_t, double>> out(dst);
    for (std::size_t i = 0; i < dst; ++i) {
      if (dst == 1 || src == 1) {
        out[i] = {0, 0.0};
        continue;
      }
      const double pos = static_cast<double>(i) * static_cast<double>(src - 1) /
                         static_cast<double>(dst - 1);
      auto lo = static_cast<std::size_t>(std::floor(pos));
      if (lo >= src - 1) lo = src - 2;
      out[i] = {lo, pos - static_cast<double>(lo)};
    }
    return out;
  };
  const auto rows = axis(map.rows(), target_rows);
  const auto cols = axis(map.cols(), target_cols);
  Grid out(target_rows, target_cols);
  for (std::size_t r = 0; r < target_rows; ++r) {
    const auto [r0, wr] = rows[r];
    const std::size_t r1 = std::min(r0 + 1, map.rows() - 1);
    for (std::size_t c = 0; c < target_cols; ++c) {
      const auto [c0, wc] = cols[c];
      const std::size_t c1 = std::min(c0 + 1, map.cols() - 1);
      const double top = map(r0, c0) + wc * (map(r0, c1) - map(r0, c0));
      const double bottom = map(r1, c0) + wc * (map(r1, c1) - map(r1, c0));
      out(r, c) = top + wr * (bottom - top);
    }
  }
  return out;
}

namespace {

void check_attention_stages(std::span<const smic::AttentionMap> attentions, StageRange range) {
  range.validate();
  if (attentions.size() != static_cast<std::size_t>(range.count())) {
    throw PreconditionError("expected attention maps for stages " + std::to_string(range.m) +
                            ".." + std::to_string(range.n) + ", got " +
                            std::to_string(attentions.size()));
  }
  for (std::size_t i = 0; i < attentions.size(); ++i) {
    if (attentions[i].stage != range.m + static_cast<int>(i)) {
      throw PreconditionError("attention maps must be ordered stages " + std::to_string(range.m) +
                              ".." + std::to_string(range.n) + "; found stage " +
                              std::to_string(attentions[i].stage));
    }
  }
}

double weighted_mean(const Grid& weights, const Grid& map) {
  if (weights.rows() != map.rows() || weights.cols() != map.cols()) {
    throw Error("internal: weight grid " + std::to_string(weights.rows()) + "x" +
                std::to_string(weights.cols()) + " does not match map " +
                std::to_string(map.rows()) + "x" + std::to_string(map.cols()));
  }
  const auto w = weights.values();
  const auto v = map.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += w[i] * v[i];
  return acc / static_cast<double>(v.size());
}

}  // namespace

QualityScore score_traditional(Metric metric, const DistortionMap& distortion,
                               std::span<const smic::AttentionMap> attentions, StageRange range) {
  if (metric == Metric::lpips) throw PreconditionError("score_traditional needs psnr or ssim");
  check_attention_stages(attentions, range);
  const std::size_t rows = distortion.values.rows();
  const std::size_t cols = distortion.values.cols();

  QualityScore score;
  score.metric = metric;
  score.smic_enabled = true;
  Grid averaged(rows, cols, 0.0);
  for (const auto& a : attentions) {
    const Grid resized = resize_bilinear(a.values, rows, cols);
    score.per_stage_terms.push_back({a.stage, weighted_mean(resized, distortion.values), true});
    auto dst = averaged.values();
    const auto src = resized.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const double count = static_cast<double>(range.count());
  for (double& v : averaged.values()) v /= count;
  score.value = weighted_mean(averaged, distortion.values);
  if (metric == Metric::psnr) score.db = psnr_db(score.value);
  return score;
}

QualityScore score_deep(Metric metric, std::span<const DistortionMap> distortions,
                        std::span<const smic::AttentionMap> attentions, StageRange range) {
  if (metric != Metric::lpips) throw PreconditionError("score_deep needs the lpips metric");
  check_attention_stages(attentions, range);
  auto find_stage = [&](int s) -> const DistortionMap& {
    for (const auto& d : distortions) {
      if (d.stage == s) return d;
    }
    throw PreconditionError("missing deep distortion map for stage " + std::to_string(s));
  };

  QualityScore score;
  score.metric = metric;
  score.smic_enabled = true;
  double weighted = 0.0;
  double rest = 0.0;
  for (int s = 1; s <= kStageCount; ++s) {
    const auto& d = find_stage(s);
    if (range.contains(s)) {
      const auto& a = attentions[static_cast<std::size_t>(s - range.m)];
      const double term = weighted_mean(a.values, d.values);
      score.per_stage_terms.push_back({s, term, true});
      weighted += term;
    } else {
      const double term = d.mean();
      score.per_stage_terms.push_back({s, term, false});
      rest += term;
    }
  }
  score.value = weighted / static_cast<double>(range.count()) + rest;
  return score;
}

void ScoreConfig::validate() const {
  stages.validate();
  if (k == 0) throw PreconditionError("k must be at least 1");
  if (patch == 0 || patch * patch < mic::kMinSamples) {
    throw PreconditionError("patch must cover at least 4 sites");
  }
  if (deep_stride == 0 || traditional_stride == 0) throw PreconditionError("strides must be positive");
  if (!(bound_exponent > 0.0 && bound_exponent <= 1.0)) {
    throw PreconditionError("bound exponent must lie in (0, 1]");
  }
}

PairContext::PairContext(ImagePlane ref, ImagePlane dist, std::shared_ptr<const Backbone> backbone)
    : ref_(std::move(ref)), dist_(std::move(dist)), backbone_(std::move(backbone)) {
  if (!ref_.same_shape(dist_)) {
    throw PreconditionError("reference and distorted images differ in shape (" +
                            std::to_string(ref_.width()) + "x" + std::to_string(ref_.height()) +
                            "x" + std::to_string(ref_.channels()) + " vs " +
                            std::to_string(dist_.width()) + "x" + std::to_string(dist_.height()) +
                            "x" + std::to_string(dist_.channels()) + ")");
  }
}

const FeatureStack& PairContext::ref_features() {
  if (!backbone_) throw PreconditionError("this configuration needs a backbone");
  if (!ref_features_) ref_features_ = extract_stage_features(*backbone_, ref_);
  return *ref_features_;
}

const FeatureStack& PairContext::dist_features() {
  if (!backbone_) throw PreconditionError("this configuration needs a backbone");
  if (!dist_features_) dist_features_ = extract_stage_features(*backbone_, dist_);
  return *dist_features_;
}

const smic::AttentionMap& PairContext::attention(const ScoreConfig& config, int stage,
                                                 std::size_t stride) {
  const AttentionKey key{stage, stride, config.patch, config.seed, config.k,
                         static_cast<int>(config.projection), config.bound_exponent,
                         config.resample_per_patch};
  if (auto it = attention_.find(key); it != attention_.end()) return it->second;
  const auto& fr = ref_features().stage(stage);
  const auto& fd = dist_features().stage(stage);
  const auto bank = smic::ProjectionBank::sample(fr.channels(), config.k, config.seed, config.projection);
  smic::AttentionOptions options;
  options.patch = config.patch;
  options.stride = stride;
  options.mic.bound_exponent = config.bound_exponent;
  options.resample_per_patch = config.resample_per_patch;
  auto map = smic::attention_map_for_stage(fr, fd, bank, stage, options);
  return attention_.emplace(key, std::move(map)).first->second;
}

std::size_t deep_patch_for_stage(const FeatureMap& features, std::size_t patch) {
  return std::min({patch, features.height(), features.width()});
}

const DistortionMap& PairContext::deep_distortion(const ScoreConfig& config, int stage) {
  const auto& fr = ref_features().stage(stage);
  const std::size_t patch =
      config.stages.contains(stage) ? config.patch : deep_patch_for_stage(fr, config.patch);
  const std::size_t stride = config.stages.contains(stage) ? config.deep_stride : patch;
  const DeepKey key{stage, patch, stride, config.normalize};
  if (auto it = deep_.find(key); it != deep_.end()) return it->second;
  DeepMapOptions options;
  options.patch = patch;
  options.stride = stride;
  options.normalize = config.normalize;
  auto map = deep_distortion_map(fr, dist_features().stage(stage), stage, options);
  return deep_.emplace(key, std::move(map)).first->second;
}

namespace {

std::vector<smic::AttentionMap> attention_maps(const ScoreConfig& config, PairContext& context,
                                               std::size_t stride) {
  std::vector<smic::AttentionMap> maps;
  for (int s = config.stages.m; s <= config.stages.n; ++s) {
    if (config.force_unit_attention) {
      const auto& f = context.ref_features().stage(s);
      const auto shape = patch_grid_shape(f.height(), f.width(), config.patch, stride, s);
      maps.push_back({s, Grid(shape.rows, shape.cols, 1.0)});
    } else {
      maps.push_back(context.attention(config, s, stride));
    }
  }
  return maps;
}

}  // namespace

QualityScore score_pair(const ScoreConfig& config, PairContext& context) {
  config.validate();
  if (config.metric == Metric::lpips) {
    std::vector<DistortionMap> maps;
    for (int s = 1; s <= kStageCount; ++s) maps.push_back(context.deep_distortion(config, s));
    if (!config.smic) {
      QualityScore score;
      score.metric = config.metric;
      for (const auto& d : maps) {
        const double term = d.mean();
        score.per_stage_terms.push_back({*d.stage, term, false});
        score.value += term;
      }
      return score;
    }
    const auto attentions = attention_maps(config, context, config.deep_stride);
    return score_deep(config.metric, maps, attentions, config.stages);
  }

  const DistortionMap distortion = config.metric == Metric::psnr
                                       ? psnr_error_map(context.ref(), context.dist())
                                       : ssim_local_map(context.ref(), context.dist());
  if (!config.smic) {
    QualityScore score;
    score.metric = config.metric;
    score.value = distortion.mean();
    if (config.metric == Metric::psnr) score.db = psnr_db(score.value);
    return score;
  }
  const auto attentions = attention_maps(config, context, config.traditional_stride);
  return score_traditional(config.metric, distortion, attentions, config.stages);
}

QualityScore score_pair(const ScoreConfig& config, const ImagePlane& ref, const ImagePlane& dist,
                        std::shared_ptr<const Backbone> backbone) {
  PairContext context(ref, dist, std::move(backbone));
  return score_pair(config, context);
}

}  // namespace smicqa
