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

#include "smicqa/smic.hpp"

#include <random>
#include <string>

#include "smicqa/error.hpp"

namespace smicqa::smic {

ProjectionBank ProjectionBank::sample(std::size_t channels, std::size_t k, std::uint64_t seed,
                                      ProjectionMode mode) {
  if (channels == 0 || k == 0) {
    throw PreconditionError("projection bank needs at least one channel and one slice");
  }
  ProjectionBank bank;
  bank.k_ = k;
  bank.channels_ = channels;
  bank.seed_ = seed;
  bank.mode_ = mode;
  bank.theta_.resize(k * channels);
  bank.phi_.resize(k * channels);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    double* theta = bank.theta_.data() + i * channels;
    for (std::size_t c = 0; c < channels; ++c) theta[c] = gauss(rng);
    double* phi = bank.phi_.data() + i * channels;
    if (mode == ProjectionMode::shared) {
      std::copy(theta, theta + channels, phi);
    } else {
      for (std::size_t c = 0; c < channels; ++c) phi[c] = gauss(rng);
    }
  }
  return bank;
}

std::vector<double> project_patch(const FeatureMap& patch, std::span<const double> vector) {
  if (vector.size() != patch.channels()) {
    throw PreconditionError("projection vector has " + std::to_string(vector.size()) +
                            " entries but the patch has " + std::to_string(patch.channels()) +
                            " channels");
  }
  std::vector<double> out(patch.height() * patch.width());
  for (std::size_t y = 0; y < patch.height(); ++y) {
    for (std::size_t x = 0; x < patch.width(); ++x) {
      const auto site = patch.site(y, x);
      double acc = 0.0;
      for (std::size_t c = 0; c < site.size(); ++c) acc += static_cast<double>(site[c]) * vector[c];
      out[y * patch.width() + x] = acc;
    }
  }
  return out;
}

namespace {

void check_pair(const FeatureMap& ref, const FeatureMap& dist, const ProjectionBank& bank) {
  if (!ref.same_shape(dist)) {
    throw PreconditionError("reference and distorted features differ in shape");
  }
  if (bank.channels() != ref.channels()) {
    throw PreconditionError("projection bank has " + std::to_string(bank.channels()) +
                            " channels, features have " + std::to_string(ref.channels()));
  }
}

}  // namespace

double smic_patch(const FeaturePatchPair& pair, const ProjectionBank& bank,
                  const MicConfig& config) {
  check_pair(pair.ref_patch, pair.dist_patch, bank);
  if (pair.ref_patch.height() * pair.ref_patch.width() < mic::kMinSamples) {
    throw PreconditionError("patch needs at least 4 spatial sites");
  }
  mic::ApproxMic estimator(config.bound_exponent);
  double sum = 0.0;
  for (std::size_t i = 0; i < bank.k(); ++i) {
    const auto xs = project_patch(pair.ref_patch, bank.theta(i));
    const auto ys = project_patch(pair.dist_patch, bank.phi(i));
    sum += estimator(xs, ys);
  }
  return sum / static_cast<double>(bank.k());
}

std::uint64_t tile_seed(std::uint64_t seed, std::size_t tile_index) {
  // splitmix64 finaliser over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(tile_index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

AttentionMap attention_map_for_stage(const FeatureMap& ref_features,
                                     const FeatureMap& dist_features, const ProjectionBank& bank,
                                     int stage, const AttentionOptions& options) {
  check_pair(ref_features, dist_features, bank);
  const auto shape = patch_grid_shape(ref_features.height(), ref_features.width(), options.patch,
                                      options.stride, stage);
  if (options.patch * options.patch < mic::kMinSamples) {
    throw PreconditionError("patch needs at least 4 spatial sites");
  }
  const auto tiles = extract_patch_grid(ref_features, options.patch, options.stride, stage);
  AttentionMap out{stage, Grid(shape.rows, shape.cols)};
  auto values = out.values.values();

  if (options.resample_per_patch) {
    for (std::size_t t = 0; t < tiles.size(); ++t) {
      const auto tile_bank = ProjectionBank::sample(bank.channels(), bank.k(),
                                                    tile_seed(bank.seed(), t), bank.mode());
      FeaturePatchPair pair{
          ref_features.crop(tiles[t].row, tiles[t].col, options.patch, options.patch),
          dist_features.crop(tiles[t].row, tiles[t].col, options.patch, options.patch), stage};
      values[t] = 1.0 - smic_patch(pair, tile_bank, options.mic);
    }
    return out;
  }

  // Project the whole stage once per slice; a tile's projected sequence is then
  // a gather of the stage projection, identical to projecting the cropped patch.
  const std::size_t height = ref_features.height();
  const std::size_t width = ref_features.width();
  const std::size_t sites = options.patch * options.patch;
  std::vector<double> sums(tiles.size(), 0.0);
  std::vector<double> ref_proj(height * width), dist_proj(height * width);
  std::vector<double> xs(sites), ys(sites);
  mic::ApproxMic estimator(options.mic.bound_exponent);

  auto project_stage = [&](const FeatureMap& f, std::span<const double> v, std::vector<double>& out_proj) {
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const auto site = f.site(y, x);
        double acc = 0.0;
        for (std::size_t c = 0; c < site.size(); ++c) acc += static_cast<double>(site[c]) * v[c];
        out_proj[y * width + x] = acc;
      }
    }
  };

  for (std::size_t i = 0; i < bank.k(); ++i) {
    project_stage(ref_features, bank.theta(i), ref_proj);
    if (bank.mode() == ProjectionMode::shared && &ref_features == &dist_features) {
      dist_proj = ref_proj;
    } else {
      project_stage(dist_features, bank.phi(i), dist_proj);
    }
    for (std::size_t t = 0; t < tiles.size(); ++t) {
      std::size_t j = 0;
      for (std::size_t r = 0; r < options.patch; ++r) {
        const std::size_t base = (tiles[t].row + r) * width + tiles[t].col;
        for (std::size_t c = 0; c < options.patch; ++c, ++j) {
          xs[j] = ref_proj[base + c];
          ys[j] = dist_proj[base + c];
        }
      }
      sums[t] += estimator(xs, ys);
    }
  }
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    values[t] = 1.0 - sums[t] / static_cast<double>(bank.k());
  }
  return out;
}

}  // namespace smicqa::smic
