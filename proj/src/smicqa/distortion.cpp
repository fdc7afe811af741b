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

#include "smicqa/distortion.hpp"

#include <array>
#include <cmath>
#include <string>

#include "smicqa/error.hpp"

namespace smicqa {

DistortionMap psnr_error_map(const ImagePlane& ref, const ImagePlane& dist) {
  if (!ref.same_shape(dist)) throw PreconditionError("reference and distorted images differ in shape");
  Grid map(ref.height(), ref.width());
  const double channels = static_cast<double>(ref.channels());
  for (std::size_t y = 0; y < ref.height(); ++y) {
    for (std::size_t x = 0; x < ref.width(); ++x) {
      double acc = 0.0;
      for (std::size_t c = 0; c < ref.channels(); ++c) {
        const double d = ref(y, x, c) - dist(y, x, c);
        acc += d * d;
      }
      map(y, x) = acc / channels;
    }
  }
  return {MapKind::psnr, std::nullopt, std::move(map)};
}

namespace {

std::array<double, kSsimWindow> gaussian_window() {
  std::array<double, kSsimWindow> w{};
  const double centre = (kSsimWindow - 1) / 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i) - centre;
    w[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable "valid" Gaussian filtering of a height x width plane.
Grid filter_valid(const std::vector<double>& plane, std::size_t height, std::size_t width,
                  const std::array<double, kSsimWindow>& w) {
  const std::size_t out_w = width - kSsimWindow + 1;
  const std::size_t out_h = height - kSsimWindow + 1;
  std::vector<double> horizontal(height * out_w);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += w[k] * plane[y * width + x + k];
      horizontal[y * out_w + x] = acc;
    }
  }
  Grid out(out_h, out_w);
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += w[k] * horizontal[(y + k) * out_w + x];
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

DistortionMap ssim_local_map(const ImagePlane& ref, const ImagePlane& dist) {
  if (!ref.same_shape(dist)) throw PreconditionError("reference and distorted images differ in shape");
  if (ref.width() < kSsimWindow || ref.height() < kSsimWindow) {
    throw PreconditionError("SSIM needs images of at least 11x11 pixels, got " +
                            std::to_string(ref.width()) + "x" + std::to_string(ref.height()));
  }
  const auto a = ref.luminance();
  const auto b = dist.luminance();
  const std::size_t h = a.height();
  const std::size_t wdt = a.width();
  const std::size_t n = h * wdt;
  std::vector<double> aa(n), bb(n), ab(n);
  std::vector<double> av(a.values().begin(), a.values().end());
  std::vector<double> bv(b.values().begin(), b.values().end());
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = av[i] * av[i];
    bb[i] = bv[i] * bv[i];
    ab[i] = av[i] * bv[i];
  }
  const auto w = gaussian_window();
  const Grid mu_a = filter_valid(av, h, wdt, w);
  const Grid mu_b = filter_valid(bv, h, wdt, w);
  const Grid e_aa = filter_valid(aa, h, wdt, w);
  const Grid e_bb = filter_valid(bb, h, wdt, w);
  const Grid e_ab = filter_valid(ab, h, wdt, w);

  Grid map(mu_a.rows(), mu_a.cols());
  for (std::size_t y = 0; y < map.rows(); ++y) {
    for (std::size_t x = 0; x < map.cols(); ++x) {
      const double ma = mu_a(y, x);
      const double mb = mu_b(y, x);
      const double var_a = e_aa(y, x) - ma * ma;
      const double var_b = e_bb(y, x) - mb * mb;
      const double cov = e_ab(y, x) - ma * mb;
      map(y, x) = ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
                  ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
    }
  }
  return {MapKind::ssim, std::nullopt, std::move(map)};
}

FeatureMap normalize_channels(const FeatureMap& features) {
  FeatureMap out = features;
  for (std::size_t y = 0; y < out.height(); ++y) {
    for (std::size_t x = 0; x < out.width(); ++x) {
      auto site = out.site(y, x);
      double norm = 0.0;
      for (float v : site) norm += static_cast<double>(v) * v;
      const double scale = 1.0 / (std::sqrt(norm) + 1e-10);
      for (float& v : site) v = static_cast<float>(v * scale);
    }
  }
  return out;
}

DistortionMap deep_distortion_map(const FeatureMap& ref_features, const FeatureMap& dist_features,
                                  int stage, const DeepMapOptions& options) {
  if (!ref_features.same_shape(dist_features)) {
    throw PreconditionError("stage " + std::to_string(stage) +
                            ": reference and distorted features differ in shape");
  }
  const auto shape = patch_grid_shape(ref_features.height(), ref_features.width(), options.patch,
                                      options.stride, stage);
  const FeatureMap a = options.normalize ? normalize_channels(ref_features) : ref_features;
  const FeatureMap b = options.normalize ? normalize_channels(dist_features) : dist_features;

  // Squared distance per site, then tile sums.
  Grid site_dist(a.height(), a.width());
  for (std::size_t y = 0; y < a.height(); ++y) {
    for (std::size_t x = 0; x < a.width(); ++x) {
      const auto sa = a.site(y, x);
      const auto sb = b.site(y, x);
      double acc = 0.0;
      for (std::size_t c = 0; c < sa.size(); ++c) {
        const double d = static_cast<double>(sa[c]) - static_cast<double>(sb[c]);
        acc += d * d;
      }
      site_dist(y, x) = acc;
    }
  }
  const double area = static_cast<double>(options.patch * options.patch);
  Grid map(shape.rows, shape.cols);
  for (std::size_t r = 0; r < shape.rows; ++r) {
    for (std::size_t c = 0; c < shape.cols; ++c) {
      double acc = 0.0;
      for (std::size_t dy = 0; dy < options.patch; ++dy) {
        for (std::size_t dx = 0; dx < options.patch; ++dx) {
          acc += site_dist(r * options.stride + dy, c * options.stride + dx);
        }
      }
      map(r, c) = acc / area;
    }
  }
  return {MapKind::deep, stage, std::move(map)};
}

}  // namespace smicqa
