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

#include "smicqa/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "smicqa/error.hpp"

namespace smicqa {
namespace {

using Kind = BackboneError::Kind;

// Normalised planar input, (x - mean) / std per RGB channel. Grayscale input
// is replicated to three channels.
std::vector<float> preprocess(const ImagePlane& image, const Preprocessing& pre) {
  const std::size_t plane = image.width() * image.height();
  std::vector<float> out(3 * plane);
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t src_c = image.channels() == 3 ? c : 0;
    for (std::size_t y = 0; y < image.height(); ++y) {
      for (std::size_t x = 0; x < image.width(); ++x) {
        out[c * plane + y * image.width() + x] =
            static_cast<float>((image(y, x, src_c) - pre.mean[c]) / pre.std[c]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic backbone

struct ConvLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<float> weights;  // [tap(9)][out][in]
  std::vector<float> bias;
};

FeatureMap conv3x3_leaky(const FeatureMap& input, const ConvLayer& layer) {
  const std::size_t h = input.height();
  const std::size_t w = input.width();
  FeatureMap output(h, w, layer.out);
  std::vector<float> acc(layer.out);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::copy(layer.bias.begin(), layer.bias.end(), acc.begin());
      for (int dy = -1; dy <= 1; ++dy) {
        const long yy = static_cast<long>(y) + dy;
        if (yy < 0 || yy >= static_cast<long>(h)) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const long xx = static_cast<long>(x) + dx;
          if (xx < 0 || xx >= static_cast<long>(w)) continue;
          const auto site = input.site(static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
          const std::size_t tap = static_cast<std::size_t>((dy + 1) * 3 + (dx + 1));
          const float* wt = layer.weights.data() + tap * layer.out * layer.in;
          for (std::size_t o = 0; o < layer.out; ++o) {
            float sum = 0.0f;
            const float* wo = wt + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) sum += wo[i] * site[i];
            acc[o] += sum;
          }
        }
      }
      auto dst = output.site(y, x);
      for (std::size_t o = 0; o < layer.out; ++o) dst[o] = acc[o] > 0.0f ? acc[o] : 0.1f * acc[o];
    }
  }
  return output;
}

FeatureMap max_pool2(const FeatureMap& input) {
  const std::size_t h = input.height() / 2;
  const std::size_t w = input.width() / 2;
  FeatureMap output(h, w, input.channels());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      auto dst = output.site(y, x);
      for (std::size_t c = 0; c < input.channels(); ++c) {
        dst[c] = std::max({input(2 * y, 2 * x, c), input(2 * y, 2 * x + 1, c),
                           input(2 * y + 1, 2 * x, c), input(2 * y + 1, 2 * x + 1, c)});
      }
    }
  }
  return output;
}

class SyntheticBackbone final : public Backbone {
 public:
  SyntheticBackbone(std::uint64_t seed, const std::array<std::size_t, kStageCount>& plan)
      : plan_(plan) {
    std::mt19937_64 rng(seed);
    std::size_t in = 3;
    for (std::size_t s = 0; s < kStageCount; ++s) {
      if (plan[s] == 0) throw PreconditionError("synthetic channel plan entries must be positive");
      ConvLayer layer;
      layer.in = in;
      layer.out = plan[s];
      std::normal_distribution<float> w_dist(0.0f, std::sqrt(2.0f / static_cast<float>(9 * in)));
      std::normal_distribution<float> b_dist(0.0f, 0.05f);
      layer.weights.resize(9 * layer.out * layer.in);
      for (auto& v : layer.weights) v = w_dist(rng);
      layer.bias.resize(layer.out);
      for (auto& v : layer.bias) v = b_dist(rng);
      layers_[s] = std::move(layer);
      in = plan[s];
    }
  }

  FeatureStack extract(const ImagePlane& image) const override {
    const auto planar = preprocess(image, pre_);
    const std::size_t plane = image.width() * image.height();
    FeatureMap x(image.height(), image.width(), 3);
    for (std::size_t y = 0; y < image.height(); ++y) {
      for (std::size_t xx = 0; xx < image.width(); ++xx) {
        for (std::size_t c = 0; c < 3; ++c) {
          x(y, xx, c) = planar[c * plane + y * image.width() + xx];
        }
      }
    }
    FeatureStack stack;
    stack.source = BackboneSource::synthetic;
    stack.preprocessing = pre_;
    for (std::size_t s = 0; s < kStageCount; ++s) {
      if (s > 0) x = max_pool2(x);
      if (x.height() == 0 || x.width() == 0) {
        throw BackboneError(Kind::inference, "stage" + std::to_string(s + 1),
                            "input too small for stage " + std::to_string(s + 1));
      }
      x = conv3x3_leaky(x, layers_[s]);
      stack.stages[s] = x;
    }
    return stack;
  }

  BackboneSource source() const override { return BackboneSource::synthetic; }
  std::array<std::size_t, kStageCount> stage_strides() const override { return {1, 2, 4, 8, 16}; }
  std::array<std::size_t, kStageCount> stage_channels() const override { return plan_; }
  const Preprocessing& preprocessing() const override { return pre_; }

 private:
  std::array<std::size_t, kStageCount> plan_;
  std::array<ConvLayer, kStageCount> layers_;
  Preprocessing pre_;
};

// ---------------------------------------------------------------------------
// ONNX backbone

FeatureMap from_nchw(const cv::Mat& blob) {
  if (blob.dims != 4 || blob.size[0] != 1 || blob.type() != CV_32F) {
    throw PreconditionError("expected a 1xCxHxW float blob");
  }
  const auto c = static_cast<std::size_t>(blob.size[1]);
  const auto h = static_cast<std::size_t>(blob.size[2]);
  const auto w = static_cast<std::size_t>(blob.size[3]);
  FeatureMap out(h, w, c);
  const float* src = blob.ptr<float>();
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) out(y, x, ch) = src[(ch * h + y) * w + x];
    }
  }
  return out;
}

class OnnxBackbone final : public Backbone {
 public:
  explicit OnnxBackbone(const BackboneConfig& config) : config_(config) {
    const auto& path = config.model_path;
    if (path.empty() || !std::filesystem::is_regular_file(path)) {
      throw BackboneError(Kind::missing_file, path.string(), "model file not found: " + path.string());
    }
    try {
      net_ = cv::dnn::readNetFromONNX(path.string());
    } catch (const cv::Exception& e) {
      throw BackboneError(Kind::load_failed, path.string(),
                          "cannot load model " + path.string() + ": " + e.what());
    }
    if (net_.empty()) {
      throw BackboneError(Kind::load_failed, path.string(), "model is empty: " + path.string());
    }
    net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
    for (const auto& tap : config.stage_taps) {
      if (net_.getLayerId(tap) < 0) {
        throw BackboneError(Kind::missing_tap, tap, "model has no tap node named '" + tap + "'");
      }
    }
    probe();
  }

  FeatureStack extract(const ImagePlane& image) const override {
    const auto planar = preprocess(image, config_.preprocessing);
    FeatureStack stack;
    stack.source = BackboneSource::pretrained;
    stack.preprocessing = config_.preprocessing;
    auto outputs = forward(planar, image.height(), image.width());
    for (std::size_t s = 0; s < kStageCount; ++s) stack.stages[s] = std::move(outputs[s]);
    return stack;
  }

  BackboneSource source() const override { return BackboneSource::pretrained; }
  std::array<std::size_t, kStageCount> stage_strides() const override { return strides_; }
  std::array<std::size_t, kStageCount> stage_channels() const override { return channels_; }
  const Preprocessing& preprocessing() const override { return config_.preprocessing; }

 private:
  std::array<FeatureMap, kStageCount> forward(const std::vector<float>& planar, std::size_t h,
                                              std::size_t w) const {
    const int shape[] = {1, 3, static_cast<int>(h), static_cast<int>(w)};
    cv::Mat blob(4, shape, CV_32F, const_cast<float*>(planar.data()));
    std::vector<cv::String> names(config_.stage_taps.begin(), config_.stage_taps.end());
    std::vector<cv::Mat> outs;
    {
      std::lock_guard lock(mutex_);
      try {
        net_.setInput(blob);
        net_.forward(outs, names);
      } catch (const cv::Exception& e) {
        throw BackboneError(Kind::inference, "forward",
                            std::string("inference failed while computing the stage taps: ") + e.what());
      }
    }
    std::array<FeatureMap, kStageCount> result;
    for (std::size_t s = 0; s < kStageCount; ++s) {
      try {
        result[s] = from_nchw(outs.at(s));
      } catch (const std::exception& e) {
        throw BackboneError(Kind::inference, config_.stage_taps[s],
                            "stage " + std::to_string(s + 1) + " (" + config_.stage_taps[s] +
                                "): " + e.what());
      }
    }
    return result;
  }

  void probe() {
    const ImagePlane zeros(kProbeSide, kProbeSide, 3,
                           std::vector<double>(kProbeSide * kProbeSide * 3, 0.0));
    std::array<FeatureMap, kStageCount> maps;
    try {
      maps = forward(preprocess(zeros, config_.preprocessing), kProbeSide, kProbeSide);
    } catch (const BackboneError& e) {
      throw BackboneError(Kind::probe_failed, e.subject(), std::string("probe failed: ") + e.what());
    }
    for (std::size_t s = 0; s < kStageCount; ++s) {
      const auto& m = maps[s];
      const auto& tap = config_.stage_taps[s];
      if (m.height() == 0 || m.width() == 0 || m.channels() == 0) {
        throw BackboneError(Kind::probe_failed, tap, "probe: tap '" + tap + "' produced an empty tensor");
      }
      if (s > 0) {
        const auto& prev = maps[s - 1];
        auto halves = [](std::size_t before, std::size_t after) {
          return after == before / 2 || after == (before + 1) / 2;
        };
        if (!halves(prev.height(), m.height()) || !halves(prev.width(), m.width())) {
          throw BackboneError(Kind::probe_failed, tap,
                              "probe: tap '" + tap + "' does not halve the previous stage's size");
        }
        if (s < 4 && m.channels() < prev.channels()) {
          throw BackboneError(Kind::probe_failed, tap,
                              "probe: channel counts must not decrease through stage 4");
        }
      }
      channels_[s] = m.channels();
      strides_[s] = kProbeSide / m.height();
    }
  }

  BackboneConfig config_;
  mutable cv::dnn::Net net_;
  mutable std::mutex mutex_;
  std::array<std::size_t, kStageCount> channels_{};
  std::array<std::size_t, kStageCount> strides_{};
};

}  // namespace

std::shared_ptr<const Backbone> load_backbone(const BackboneConfig& config) {
  return std::make_shared<const OnnxBackbone>(config);
}

std::shared_ptr<const Backbone> synthetic_backbone(
    std::uint64_t seed, const std::array<std::size_t, kStageCount>& channel_plan) {
  return std::make_shared<const SyntheticBackbone>(seed, channel_plan);
}

FeatureStack extract_stage_features(const Backbone& backbone, const ImagePlane& image) {
  if (image.width() < kMinImageSide || image.height() < kMinImageSide) {
    throw PreconditionError("feature extraction needs images of at least 32x32 pixels, got " +
                            std::to_string(image.width()) + "x" + std::to_string(image.height()));
  }
  return backbone.extract(image);
}

}  // namespace smicqa
