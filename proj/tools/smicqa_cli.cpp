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

// smicqa command line front end. Talks to the library through the C API only.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smicqa/smicqa.h"

namespace {

struct Failure {
  int code;
  std::string message;
};

void check(smicqa_status status, const std::string& context) {
  if (status != SMICQA_OK) {
    throw Failure{2, context + ": " + smicqa_last_error()};
  }
}

struct ImageDeleter {
  void operator()(smicqa_image* p) const { smicqa_image_free(p); }
};
struct BackboneDeleter {
  void operator()(smicqa_backbone* p) const { smicqa_backbone_free(p); }
};
struct AttentionDeleter {
  void operator()(smicqa_attention* p) const { smicqa_attention_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { smicqa_string_free(p); }
};
using ImagePtr = std::unique_ptr<smicqa_image, ImageDeleter>;
using BackbonePtr = std::unique_ptr<smicqa_backbone, BackboneDeleter>;
using AttentionPtr = std::unique_ptr<smicqa_attention, AttentionDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

ImagePtr load_image(const std::string& path) {
  smicqa_image* raw = nullptr;
  check(smicqa_image_load(path.c_str(), &raw), "loading " + path);
  return ImagePtr(raw);
}

// Options shared by the scoring subcommands.
struct CommonArgs {
  std::string smic = "on";
  std::uint64_t seed = 0;
  std::size_t k = 32;
  std::string stages = "3:4";
  std::string proj = "shared";
  std::string backbone;
  std::size_t backbone_seed = 0;
  bool no_normalize = false;
  std::size_t traditional_stride = 1;
  bool force_unit_attention = false;
  bool resample_per_patch = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool smic_list) {
  if (!smic_list) {
    cmd->add_option("--smic", args.smic, "Attention weighting")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
  }
  cmd->add_option("--seed", args.seed, "Projection seed")->capture_default_str();
  cmd->add_option("--k", args.k, "Projection slices")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--stages", args.stages, "Attention stage range m:n")->capture_default_str();
  cmd->add_option("--proj", args.proj, "Projection pairing")
      ->check(CLI::IsMember({"shared", "independent"}))
      ->capture_default_str();
  cmd->add_option("--backbone", args.backbone,
                  "ONNX model, .toml backbone config, or 'synthetic' "
                  "(default: $SMICQA_MODEL_PATH, else synthetic)");
  cmd->add_option("--backbone-seed", args.backbone_seed, "Seed of the synthetic backbone");
  cmd->add_flag("--no-normalize", args.no_normalize, "Skip unit normalisation of deep features");
  cmd->add_option("--traditional-stride", args.traditional_stride,
                  "Attention tile stride for psnr/ssim")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--force-unit-attention", args.force_unit_attention,
                "Debug: replace attention maps with ones");
  cmd->add_flag("--resample-per-patch", args.resample_per_patch,
                "Draw a fresh projection bank for every tile");
}

std::pair<int, int> parse_stages(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int s = std::stoi(text);
      return {s, s};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Failure{1, "--stages expects m:n, got '" + text + "'"};
  }
}

smicqa_metric parse_metric(const std::string& name) {
  if (name == "psnr") return SMICQA_METRIC_PSNR;
  if (name == "ssim") return SMICQA_METRIC_SSIM;
  if (name == "lpips" || name == "lpips_style") return SMICQA_METRIC_LPIPS;
  throw Failure{1, "unknown metric '" + name + "'"};
}

smicqa_score_options to_options(const CommonArgs& args) {
  smicqa_score_options o;
  smicqa_score_options_init(&o);
  o.smic = args.smic == "on" ? 1 : 0;
  o.seed = args.seed;
  o.k = args.k;
  const auto [m, n] = parse_stages(args.stages);
  o.stage_first = m;
  o.stage_last = n;
  o.projection = args.proj == "independent" ? SMICQA_PROJ_INDEPENDENT : SMICQA_PROJ_SHARED;
  o.normalize = args.no_normalize ? 0 : 1;
  o.traditional_stride = args.traditional_stride;
  o.force_unit_attention = args.force_unit_attention ? 1 : 0;
  o.resample_per_patch = args.resample_per_patch ? 1 : 0;
  return o;
}

BackbonePtr open_backbone(const CommonArgs& args) {
  std::string choice = args.backbone;
  if (choice.empty()) {
    const char* env = std::getenv("SMICQA_MODEL_PATH");
    if (env != nullptr && *env != '\0') {
      choice = env;
    } else {
      std::cerr << "note: no --backbone and SMICQA_MODEL_PATH unset; using the synthetic backbone\n";
      choice = "synthetic";
    }
  }
  smicqa_backbone* raw = nullptr;
  if (choice == "synthetic") {
    check(smicqa_backbone_synthetic(args.backbone_seed, nullptr, &raw), "synthetic backbone");
  } else {
    check(smicqa_backbone_load(choice.c_str(), &raw), "loading backbone " + choice);
  }
  return BackbonePtr(raw);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "json" || out == "csv" || out == "-") {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw Failure{2, "cannot write " + out};
  file << text;
  if (!file) throw Failure{2, "cannot write " + out};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_score(const std::string& metric, const std::string& ref, const std::string& dist,
              const CommonArgs& args, const std::string& out) {
  auto options = to_options(args);
  options.metric = parse_metric(metric);
  const auto r = load_image(ref);
  const auto d = load_image(dist);
  BackbonePtr backbone;
  if (options.smic || options.metric == SMICQA_METRIC_LPIPS) backbone = open_backbone(args);
  char* json = nullptr;
  check(smicqa_score_json(&options, r.get(), d.get(), backbone.get(), &json), "scoring");
  StringPtr owned(json);
  emit(json, out);
  return 0;
}

int run_evaluate(const std::string& manifest, const std::string& root, const std::string& metrics,
                 const std::string& smic_modes, const CommonArgs& args, std::size_t threads,
                 const std::string& out) {
  std::vector<smicqa_metric> metric_codes;
  for (const auto& m : split_list(metrics)) metric_codes.push_back(parse_metric(m));
  if (metric_codes.empty()) throw Failure{1, "--metrics is empty"};
  std::vector<int> modes;
  for (const auto& m : split_list(smic_modes)) {
    if (m == "on") {
      modes.push_back(1);
    } else if (m == "off") {
      modes.push_back(0);
    } else {
      throw Failure{1, "--smic expects a list of on/off, got '" + m + "'"};
    }
  }
  if (modes.empty()) throw Failure{1, "--smic is empty"};

  smicqa_eval_options options;
  smicqa_eval_options_init(&options);
  options.manifest = manifest.c_str();
  options.root = root.c_str();
  options.metrics = metric_codes.data();
  options.metric_count = metric_codes.size();
  options.smic_modes = modes.data();
  options.smic_mode_count = modes.size();
  options.base = to_options(args);
  options.threads = threads;
  const bool csv = std::filesystem::path(out).extension() == ".csv" || out == "csv";
  options.format = csv ? SMICQA_REPORT_CSV : SMICQA_REPORT_JSON;

  bool needs_backbone = false;
  for (std::size_t i = 0; i < metric_codes.size(); ++i) {
    needs_backbone = needs_backbone || metric_codes[i] == SMICQA_METRIC_LPIPS;
  }
  for (int m : modes) needs_backbone = needs_backbone || m == 1;
  BackbonePtr backbone;
  if (needs_backbone) backbone = open_backbone(args);

  char* report = nullptr;
  int aborted = 0;
  check(smicqa_evaluate(&options, backbone.get(), &report, &aborted), "evaluate");
  StringPtr owned(report);
  emit(report, out);
  if (aborted) {
    std::cerr << "error: at least one benchmark cell aborted; see the report\n";
    return 3;
  }
  return 0;
}

int run_attention_dump(const std::string& ref, const std::string& dist, const std::string& out_dir,
                       std::size_t stride, const CommonArgs& args) {
  auto options = to_options(args);
  const auto r = load_image(ref);
  const auto d = load_image(dist);
  const auto backbone = open_backbone(args);
  smicqa_attention* raw = nullptr;
  check(smicqa_attention_compute(&options, r.get(), d.get(), backbone.get(), stride, &raw),
        "attention");
  AttentionPtr attention(raw);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Failure{2, "cannot create " + out_dir + ": " + ec.message()};
  for (std::size_t i = 0; i < smicqa_attention_count(attention.get()); ++i) {
    int stage = 0;
    std::size_t rows = 0, cols = 0;
    check(smicqa_attention_get(attention.get(), i, &stage, &rows, &cols, nullptr), "attention");
    const auto path =
        (std::filesystem::path(out_dir) / ("attention_stage" + std::to_string(stage) + ".png")).string();
    check(smicqa_attention_write_image(attention.get(), i, path.c_str()), "writing " + path);
    std::cout << path << " " << rows << "x" << cols << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-reference image quality with sliced-MIC attention"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(smicqa_version()));

  CommonArgs score_args;
  std::string score_metric, score_ref, score_dist, score_out = "json";
  auto* score = app.add_subcommand("score", "Score one reference/distorted pair");
  score->add_option("--metric", score_metric, "psnr, ssim or lpips")->required();
  score->add_option("--ref", score_ref, "Reference image")->required();
  score->add_option("--dist", score_dist, "Distorted image")->required();
  score->add_option("--out", score_out, "'json' for stdout, or a file path")->capture_default_str();
  add_common(score, score_args, false);

  CommonArgs eval_args;
  std::string manifest, root = ".", metrics = "psnr,ssim,lpips", smic_modes = "on,off";
  std::string eval_out = "json";
  std::size_t threads = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Correlate scores with MOS over a manifest");
  evaluate->add_option("--manifest", manifest, "CSV with ref,dist,mos[,split][,polarity]")->required();
  evaluate->add_option("--root", root, "Directory the manifest paths are relative to")
      ->capture_default_str();
  evaluate->add_option("--metrics", metrics, "Comma-separated metrics")->capture_default_str();
  evaluate->add_option("--smic", smic_modes, "Comma-separated on/off")->capture_default_str();
  evaluate->add_option("--threads", threads, "Worker threads (0: all cores)");
  evaluate->add_option("--out", eval_out, "report.json, report.csv, or json/csv for stdout")
      ->capture_default_str();
  add_common(evaluate, eval_args, true);

  CommonArgs dump_args;
  std::string dump_ref, dump_dist, dump_dir = ".";
  std::size_t dump_stride = 7;
  auto* dump = app.add_subcommand("attention-dump", "Write attention maps as 8-bit images");
  dump->add_option("--ref", dump_ref, "Reference image")->required();
  dump->add_option("--dist", dump_dist, "Distorted image")->required();
  dump->add_option("--out-dir", dump_dir, "Output directory")->capture_default_str();
  dump->add_option("--stride", dump_stride, "Tile stride")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(dump, dump_args, false);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*score) return run_score(score_metric, score_ref, score_dist, score_args, score_out);
    if (*evaluate) {
      return run_evaluate(manifest, root, metrics, smic_modes, eval_args, threads, eval_out);
    }
    if (*dump) return run_attention_dump(dump_ref, dump_dist, dump_dir, dump_stride, dump_args);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return 1;
}
