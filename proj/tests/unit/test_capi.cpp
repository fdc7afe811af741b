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

// Exercises the shared library exactly as an external C/C++ caller would: only
// the public header and the exported symbols.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "smicqa/smicqa.h"

namespace fs = std::filesystem;

namespace {

const fs::path kData = SMICQA_TEST_DATA;

std::vector<double> pixels(std::size_t w, std::size_t h, std::size_t c, unsigned seed, double noise = 0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(w * h * c);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t k = 0; k < c; ++k) {
        double s = 0.5 + 0.3 * std::sin(0.2 * x + k) * std::cos(0.15 * y);
        s += noise * u(rng);
        v[(y * w + x) * c + k] = std::clamp(s, 0.0, 1.0);
      }
    }
  }
  return v;
}

// Binary PPM; the decoder reads it like any other format.
void write_ppm(const fs::path& p, const std::vector<double>& v, std::size_t w, std::size_t h) {
  std::ofstream out(p, std::ios::binary);
  out << "P6\n" << w << " " << h << "\n255\n";
  for (double x : v) out.put(static_cast<char>(static_cast<unsigned char>(std::floor(x * 255 + 0.5))));
}

struct Images {
  smicqa_image* ref = nullptr;
  smicqa_image* dist = nullptr;
  Images(std::size_t w, std::size_t h, double noise) {
    const auto r = pixels(w, h, 3, 1);
    const auto d = pixels(w, h, 3, 2, noise);
    EXPECT_EQ(smicqa_image_from_pixels(r.data(), w, h, 3, &ref), SMICQA_OK);
    EXPECT_EQ(smicqa_image_from_pixels(d.data(), w, h, 3, &dist), SMICQA_OK);
  }
  ~Images() {
    smicqa_image_free(ref);
    smicqa_image_free(dist);
  }
};

smicqa_backbone* synthetic() {
  const std::size_t plan[5] = {4, 8, 8, 8, 8};
  smicqa_backbone* bb = nullptr;
  EXPECT_EQ(smicqa_backbone_synthetic(1, plan, &bb), SMICQA_OK);
  return bb;
}

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(smicqa_version(), "0.1.0");
  EXPECT_STREQ(smicqa_status_name(SMICQA_OK), "ok");
  EXPECT_STRNE(smicqa_status_name(SMICQA_ERR_MISSING_TAP), smicqa_status_name(SMICQA_ERR_MODEL_LOAD));
}

TEST(CApi, ImageValidation) {
  smicqa_image* img = nullptr;
  const double bad[] = {0.5, 2.0};
  EXPECT_EQ(smicqa_image_from_pixels(bad, 2, 1, 1, &img), SMICQA_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(img, nullptr);
  EXPECT_NE(std::strlen(smicqa_last_error()), 0u);
  EXPECT_EQ(smicqa_image_from_pixels(nullptr, 2, 1, 1, &img), SMICQA_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(smicqa_image_load("/nonexistent/x.png", &img), SMICQA_ERR_IMAGE_IO);
  const double ok[] = {0.5, 1.0};
  ASSERT_EQ(smicqa_image_from_pixels(ok, 2, 1, 1, &img), SMICQA_OK);
  std::size_t w = 0, h = 0, c = 0;
  ASSERT_EQ(smicqa_image_size(img, &w, &h, &c), SMICQA_OK);
  EXPECT_EQ(w, 2u);
  EXPECT_EQ(h, 1u);
  EXPECT_EQ(c, 1u);
  smicqa_image_free(img);
  smicqa_image_free(nullptr);
}

TEST(CApi, BaselineScoresWithoutBackbone) {
  Images im(32, 32, 0.1);
  smicqa_score_options o;
  smicqa_score_options_init(&o);
  EXPECT_EQ(o.k, 32u);
  EXPECT_EQ(o.stage_first, 3);
  EXPECT_EQ(o.stage_last, 4);
  o.smic = 0;
  smicqa_score s{};
  ASSERT_EQ(smicqa_score_pair(&o, im.ref, im.dist, nullptr, &s), SMICQA_OK);
  EXPECT_TRUE(s.has_db);
  EXPECT_NEAR(s.db, 10 * std::log10(1 / s.value), 1e-9);
  o.smic = 1;
  EXPECT_EQ(smicqa_score_pair(&o, im.ref, im.dist, nullptr, &s), SMICQA_ERR_INVALID_ARGUMENT);
}

TEST(CApi, SmicScoreAndJson) {
  Images im(64, 64, 0.1);
  smicqa_backbone* bb = synthetic();
  EXPECT_EQ(smicqa_backbone_is_pretrained(bb), 0);
  smicqa_score_options o;
  smicqa_score_options_init(&o);
  o.metric = SMICQA_METRIC_LPIPS;
  o.k = 4;
  smicqa_score s{};
  ASSERT_EQ(smicqa_score_pair(&o, im.ref, im.dist, bb, &s), SMICQA_OK);
  EXPECT_GT(s.value, 0.0);
  EXPECT_FALSE(s.has_db);
  ASSERT_EQ(s.term_count, 5u);
  EXPECT_EQ(s.term_weighted[2], 1);
  EXPECT_EQ(s.term_weighted[0], 0);
  char* json = nullptr;
  ASSERT_EQ(smicqa_score_json(&o, im.ref, im.dist, bb, &json), SMICQA_OK);
  const auto j = nlohmann::json::parse(json);
  smicqa_string_free(json);
  EXPECT_EQ(j["metric"], "lpips");
  EXPECT_EQ(j["per_stage_terms"].size(), 5u);
  EXPECT_DOUBLE_EQ(j["value"].get<double>(), s.value);
  smicqa_backbone_free(bb);
}

TEST(CApi, StageTooSmallStatus) {
  Images im(40, 40, 0.1);
  smicqa_backbone* bb = synthetic();
  smicqa_score_options o;
  smicqa_score_options_init(&o);
  o.k = 2;
  smicqa_score s{};
  EXPECT_EQ(smicqa_score_pair(&o, im.ref, im.dist, bb, &s), SMICQA_ERR_STAGE_TOO_SMALL);
  EXPECT_NE(std::string(smicqa_last_error()).find("stage 4"), std::string::npos);
  smicqa_backbone_free(bb);
}

TEST(CApi, AttentionMaps) {
  Images im(64, 64, 0.2);
  smicqa_backbone* bb = synthetic();
  smicqa_score_options o;
  smicqa_score_options_init(&o);
  o.k = 2;
  smicqa_attention* a = nullptr;
  ASSERT_EQ(smicqa_attention_compute(&o, im.ref, im.dist, bb, 7, &a), SMICQA_OK);
  ASSERT_EQ(smicqa_attention_count(a), 2u);
  int stage = 0;
  std::size_t rows = 0, cols = 0;
  const double* values = nullptr;
  ASSERT_EQ(smicqa_attention_get(a, 0, &stage, &rows, &cols, &values), SMICQA_OK);
  EXPECT_EQ(stage, 3);
  EXPECT_EQ(rows, 2u);
  EXPECT_EQ(cols, 2u);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    EXPECT_GE(values[i], 0.0);
    EXPECT_LE(values[i], 1.0);
  }
  EXPECT_EQ(smicqa_attention_get(a, 2, &stage, &rows, &cols, &values), SMICQA_ERR_INVALID_ARGUMENT);
  const auto out = fs::temp_directory_path() / ("smicqa_capi_att_" + std::to_string(::getpid()) + ".png");
  EXPECT_EQ(smicqa_attention_write_image(a, 1, out.c_str()), SMICQA_OK);
  EXPECT_TRUE(fs::exists(out));
  smicqa_attention_free(a);
  smicqa_backbone_free(bb);
}

TEST(CApi, BackboneLoadStatuses) {
  smicqa_backbone* bb = nullptr;
  EXPECT_EQ(smicqa_backbone_load((kData / "absent.onnx").c_str(), &bb), SMICQA_ERR_MODEL_NOT_FOUND);
  EXPECT_EQ(smicqa_backbone_load((kData / "mini_vgg_4taps.onnx").c_str(), &bb), SMICQA_ERR_MISSING_TAP);
  EXPECT_NE(std::string(smicqa_last_error()).find("relu5_3"), std::string::npos);
  const auto junk = fs::temp_directory_path() / ("smicqa_capi_junk_" + std::to_string(::getpid()) + ".onnx");
  std::ofstream(junk) << "garbage";
  EXPECT_EQ(smicqa_backbone_load(junk.c_str(), &bb), SMICQA_ERR_MODEL_LOAD);
  const auto toml = fs::temp_directory_path() / ("smicqa_capi_" + std::to_string(::getpid()) + ".toml");
  std::ofstream(toml) << "[backbone]\nstage_taps = [\"a\"]\n";
  EXPECT_EQ(smicqa_backbone_load(toml.c_str(), &bb), SMICQA_ERR_CONFIG);
  ASSERT_EQ(smicqa_backbone_load((kData / "mini_vgg.onnx").c_str(), &bb), SMICQA_OK);
  EXPECT_EQ(smicqa_backbone_is_pretrained(bb), 1);
  std::size_t ch[5] = {};
  ASSERT_EQ(smicqa_backbone_stage_channels(bb, ch), SMICQA_OK);
  EXPECT_EQ(ch[0], 4u);
  EXPECT_EQ(ch[4], 32u);
  smicqa_backbone_free(bb);
}

TEST(CApi, Mic) {
  std::vector<double> xs, ys;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(i);
    ys.push_back(i * i);
  }
  double v = 0;
  ASSERT_EQ(smicqa_mic(xs.data(), ys.data(), xs.size(), 1, 0.5, &v), SMICQA_OK);
  EXPECT_DOUBLE_EQ(v, 1.0);
  ASSERT_EQ(smicqa_mic(xs.data(), ys.data(), xs.size(), 0, 0.5, &v), SMICQA_OK);
  EXPECT_DOUBLE_EQ(v, 1.0);
  std::vector<double> big(65, 1.0);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
  EXPECT_EQ(smicqa_mic(big.data(), big.data(), big.size(), 1, 0.5, &v), SMICQA_ERR_SEARCH_TOO_LARGE);
  EXPECT_EQ(smicqa_mic(xs.data(), ys.data(), 3, 0, 0.5, &v), SMICQA_ERR_INVALID_ARGUMENT);
}

TEST(CApi, Evaluate) {
  const auto dir = fs::temp_directory_path() / ("smicqa_capi_eval_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_ppm(dir / "ref.ppm", pixels(32, 32, 3, 1), 32, 32);
  {
    std::ofstream csv(dir / "m.csv");
    csv << "ref,dist,mos\n";
    for (int i = 0; i < 10; ++i) {
      const auto name = "d" + std::to_string(i) + ".ppm";
      write_ppm(dir / name, pixels(32, 32, 3, 1, 0.02 + 0.04 * i), 32, 32);
      csv << "ref.ppm," << name << "," << 10 - i << "\n";
    }
  }
  smicqa_eval_options o;
  smicqa_eval_options_init(&o);
  const std::string manifest = (dir / "m.csv").string();
  const std::string root = dir.string();
  const smicqa_metric metrics[] = {SMICQA_METRIC_PSNR};
  const int modes[] = {0};
  o.manifest = manifest.c_str();
  o.root = root.c_str();
  o.metrics = metrics;
  o.metric_count = 1;
  o.smic_modes = modes;
  o.smic_mode_count = 1;
  char* report = nullptr;
  int aborted = -1;
  ASSERT_EQ(smicqa_evaluate(&o, nullptr, &report, &aborted), SMICQA_OK) << smicqa_last_error();
  EXPECT_EQ(aborted, 0);
  const auto j = nlohmann::json::parse(report);
  EXPECT_NEAR(j["cells"][0]["srcc"].get<double>(), 1.0, 1e-12);
  smicqa_string_free(report);
  o.format = SMICQA_REPORT_CSV;
  ASSERT_EQ(smicqa_evaluate(&o, nullptr, &report, &aborted), SMICQA_OK);
  EXPECT_EQ(std::string(report).rfind("dataset,", 0), 0u);
  smicqa_string_free(report);
  o.manifest = "/nonexistent.csv";
  EXPECT_EQ(smicqa_evaluate(&o, nullptr, &report, &aborted), SMICQA_ERR_MANIFEST);
}
