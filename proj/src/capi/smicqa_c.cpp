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

#include "smicqa/smicqa.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "smicqa/backbone.hpp"
#include "smicqa/benchmark.hpp"
#include "smicqa/error.hpp"
#include "smicqa/image.hpp"
#include "smicqa/mic.hpp"
#include "smicqa/scoring.hpp"

struct smicqa_image {
  smicqa::ImagePlane plane;
};

struct smicqa_backbone {
  std::shared_ptr<const smicqa::Backbone> impl;
};

struct smicqa_attention {
  std::vector<smicqa::smic::AttentionMap> maps;
};

namespace {

thread_local std::string last_error;

smicqa_status fail(smicqa_status status, const std::string& message) {
  last_error = message;
  return status;
}

smicqa_status backbone_status(smicqa::BackboneError::Kind kind) {
  using Kind = smicqa::BackboneError::Kind;
  switch (kind) {
    case Kind::missing_file: return SMICQA_ERR_MODEL_NOT_FOUND;
    case Kind::load_failed: return SMICQA_ERR_MODEL_LOAD;
    case Kind::missing_tap: return SMICQA_ERR_MISSING_TAP;
    case Kind::probe_failed: return SMICQA_ERR_SHAPE_PROBE;
    case Kind::inference: return SMICQA_ERR_INFERENCE;
  }
  return SMICQA_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
smicqa_status guarded(Body&& body) {
  last_error.clear();
  try {
    body();
    return SMICQA_OK;
  } catch (const smicqa::PreconditionError& e) {
    return fail(SMICQA_ERR_INVALID_ARGUMENT, e.what());
  } catch (const smicqa::SearchTooLargeError& e) {
    return fail(SMICQA_ERR_SEARCH_TOO_LARGE, e.what());
  } catch (const smicqa::StageTooSmallError& e) {
    return fail(SMICQA_ERR_STAGE_TOO_SMALL, e.what());
  } catch (const smicqa::BackboneError& e) {
    return fail(backbone_status(e.kind()), e.what());
  } catch (const smicqa::ImageIoError& e) {
    return fail(SMICQA_ERR_IMAGE_IO, e.what());
  } catch (const smicqa::ConfigError& e) {
    return fail(SMICQA_ERR_CONFIG, e.what());
  } catch (const smicqa::ManifestError& e) {
    return fail(SMICQA_ERR_MANIFEST, e.what());
  } catch (const smicqa::DegenerateError& e) {
    return fail(SMICQA_ERR_DEGENERATE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SMICQA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SMICQA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SMICQA_ERR_INTERNAL, "unknown error");
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw smicqa::PreconditionError(message);
}

char* copy_string(const std::string& text) {
  auto* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

smicqa::Metric to_metric(smicqa_metric metric) {
  switch (metric) {
    case SMICQA_METRIC_PSNR: return smicqa::Metric::psnr;
    case SMICQA_METRIC_SSIM: return smicqa::Metric::ssim;
    case SMICQA_METRIC_LPIPS: return smicqa::Metric::lpips;
  }
  throw smicqa::PreconditionError("unknown metric code");
}

smicqa::ScoreConfig to_config(const smicqa_score_options& o) {
  smicqa::ScoreConfig c;
  c.metric = to_metric(o.metric);
  c.smic = o.smic != 0;
  c.seed = o.seed;
  c.k = o.k;
  c.stages = {o.stage_first, o.stage_last};
  switch (o.projection) {
    case SMICQA_PROJ_SHARED: c.projection = smicqa::smic::ProjectionMode::shared; break;
    case SMICQA_PROJ_INDEPENDENT: c.projection = smicqa::smic::ProjectionMode::independent; break;
    default: throw smicqa::PreconditionError("unknown projection mode");
  }
  c.normalize = o.normalize != 0;
  c.patch = o.patch;
  c.deep_stride = o.deep_stride;
  c.traditional_stride = o.traditional_stride;
  c.bound_exponent = o.bound_exponent;
  c.force_unit_attention = o.force_unit_attention != 0;
  c.resample_per_patch = o.resample_per_patch != 0;
  c.validate();
  return c;
}

std::shared_ptr<const smicqa::Backbone> backbone_of(const smicqa_backbone* b) {
  return b == nullptr ? nullptr : b->impl;
}

smicqa::QualityScore run_score(const smicqa_score_options* options, const smicqa_image* ref,
                               const smicqa_image* dist, const smicqa_backbone* backbone) {
  require(options != nullptr && ref != nullptr && dist != nullptr, "null argument");
  const auto config = to_config(*options);
  return smicqa::score_pair(config, ref->plane, dist->plane, backbone_of(backbone));
}

}  // namespace

extern "C" {

const char* smicqa_version(void) { return "0.1.0"; }

const char* smicqa_status_name(smicqa_status status) {
  switch (status) {
    case SMICQA_OK: return "ok";
    case SMICQA_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SMICQA_ERR_SEARCH_TOO_LARGE: return "search too large";
    case SMICQA_ERR_STAGE_TOO_SMALL: return "stage too small";
    case SMICQA_ERR_MODEL_NOT_FOUND: return "model not found";
    case SMICQA_ERR_MODEL_LOAD: return "model load failed";
    case SMICQA_ERR_MISSING_TAP: return "missing tap";
    case SMICQA_ERR_SHAPE_PROBE: return "shape probe failed";
    case SMICQA_ERR_INFERENCE: return "inference failed";
    case SMICQA_ERR_IMAGE_IO: return "image i/o";
    case SMICQA_ERR_CONFIG: return "config";
    case SMICQA_ERR_MANIFEST: return "manifest";
    case SMICQA_ERR_DEGENERATE: return "degenerate input";
    case SMICQA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* smicqa_last_error(void) { return last_error.c_str(); }

void smicqa_string_free(char* text) { std::free(text); }

smicqa_status smicqa_image_load(const char* path, smicqa_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new smicqa_image{smicqa::load_image(path)};
  });
}

smicqa_status smicqa_image_from_pixels(const double* values, size_t width, size_t height,
                                       size_t channels, smicqa_image** out) {
  return guarded([&] {
    require(values != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    std::vector<double> data(values, values + width * height * channels);
    *out = new smicqa_image{smicqa::ImagePlane(width, height, channels, std::move(data))};
  });
}

smicqa_status smicqa_image_size(const smicqa_image* image, size_t* width, size_t* height,
                                size_t* channels) {
  return guarded([&] {
    require(image != nullptr, "null image");
    if (width) *width = image->plane.width();
    if (height) *height = image->plane.height();
    if (channels) *channels = image->plane.channels();
  });
}

void smicqa_image_free(smicqa_image* image) { delete image; }

smicqa_status smicqa_backbone_load(const char* path, smicqa_backbone** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const std::filesystem::path p(path);
    smicqa::BackboneConfig config;
    if (p.extension() == ".toml") {
      config = smicqa::load_backbone_config(p);
    } else {
      config.model_path = p;
    }
    *out = new smicqa_backbone{smicqa::load_backbone(config)};
  });
}

smicqa_status smicqa_backbone_synthetic(uint64_t seed, const size_t* channel_plan,
                                        smicqa_backbone** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = nullptr;
    auto plan = smicqa::kDefaultSyntheticPlan;
    if (channel_plan != nullptr) std::copy(channel_plan, channel_plan + smicqa::kStageCount, plan.begin());
    *out = new smicqa_backbone{smicqa::synthetic_backbone(seed, plan)};
  });
}

int smicqa_backbone_is_pretrained(const smicqa_backbone* backbone) {
  return backbone != nullptr && backbone->impl->source() == smicqa::BackboneSource::pretrained;
}

smicqa_status smicqa_backbone_stage_channels(const smicqa_backbone* backbone, size_t channels[5]) {
  return guarded([&] {
    require(backbone != nullptr && channels != nullptr, "null argument");
    const auto c = backbone->impl->stage_channels();
    std::copy(c.begin(), c.end(), channels);
  });
}

void smicqa_backbone_free(smicqa_backbone* backbone) { delete backbone; }

void smicqa_score_options_init(smicqa_score_options* options) {
  if (options == nullptr) return;
  const smicqa::ScoreConfig d;
  options->metric = SMICQA_METRIC_PSNR;
  options->smic = 1;
  options->seed = d.seed;
  options->k = d.k;
  options->stage_first = d.stages.m;
  options->stage_last = d.stages.n;
  options->projection = SMICQA_PROJ_SHARED;
  options->normalize = d.normalize ? 1 : 0;
  options->patch = d.patch;
  options->deep_stride = d.deep_stride;
  options->traditional_stride = d.traditional_stride;
  options->bound_exponent = d.bound_exponent;
  options->force_unit_attention = 0;
  options->resample_per_patch = 0;
}

smicqa_status smicqa_score_pair(const smicqa_score_options* options, const smicqa_image* ref,
                                const smicqa_image* dist, const smicqa_backbone* backbone,
                                smicqa_score* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto score = run_score(options, ref, dist, backbone);
    *out = smicqa_score{};
    out->value = score.value;
    out->has_db = score.db.has_value() ? 1 : 0;
    out->db = score.db.value_or(0.0);
    out->term_count = score.per_stage_terms.size();
    for (std::size_t i = 0; i < score.per_stage_terms.size(); ++i) {
      out->term_stage[i] = score.per_stage_terms[i].stage;
      out->term_value[i] = score.per_stage_terms[i].value;
      out->term_weighted[i] = score.per_stage_terms[i].weighted ? 1 : 0;
    }
  });
}

smicqa_status smicqa_score_json(const smicqa_score_options* options, const smicqa_image* ref,
                                const smicqa_image* dist, const smicqa_backbone* backbone,
                                char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "null output");
    *out_json = nullptr;
    const auto score = run_score(options, ref, dist, backbone);
    nlohmann::ordered_json j;
    j["metric"] = smicqa::to_string(score.metric);
    j["value"] = score.value;
    if (score.db) j["db"] = *score.db;
    j["smic"] = options->smic != 0;
    j["seed"] = options->seed;
    auto terms = nlohmann::ordered_json::array();
    for (const auto& t : score.per_stage_terms) {
      terms.push_back({{"stage", t.stage}, {"value", t.value}, {"weighted", t.weighted}});
    }
    j["per_stage_terms"] = std::move(terms);
    *out_json = copy_string(j.dump(2));
  });
}

smicqa_status smicqa_attention_compute(const smicqa_score_options* options,
                                       const smicqa_image* ref, const smicqa_image* dist,
                                       const smicqa_backbone* backbone, size_t stride,
                                       smicqa_attention** out) {
  return guarded([&] {
    require(options != nullptr && ref != nullptr && dist != nullptr && out != nullptr,
            "null argument");
    require(backbone != nullptr, "attention maps need a backbone");
    *out = nullptr;
    const auto config = to_config(*options);
    require(stride >= 1, "stride must be positive");
    smicqa::PairContext context(ref->plane, dist->plane, backbone->impl);
    auto result = std::make_unique<smicqa_attention>();
    for (int s = config.stages.m; s <= config.stages.n; ++s) {
      result->maps.push_back(context.attention(config, s, stride));
    }
    *out = result.release();
  });
}

size_t smicqa_attention_count(const smicqa_attention* attention) {
  return attention == nullptr ? 0 : attention->maps.size();
}

smicqa_status smicqa_attention_get(const smicqa_attention* attention, size_t index, int* stage,
                                   size_t* rows, size_t* cols, const double** values) {
  return guarded([&] {
    require(attention != nullptr, "null attention");
    require(index < attention->maps.size(), "attention index out of range");
    const auto& m = attention->maps[index];
    if (stage) *stage = m.stage;
    if (rows) *rows = m.values.rows();
    if (cols) *cols = m.values.cols();
    if (values) *values = m.values.values().data();
  });
}

smicqa_status smicqa_attention_write_image(const smicqa_attention* attention, size_t index,
                                           const char* path) {
  return guarded([&] {
    require(attention != nullptr && path != nullptr, "null argument");
    require(index < attention->maps.size(), "attention index out of range");
    smicqa::save_gray8(path, attention->maps[index].values);
  });
}

void smicqa_attention_free(smicqa_attention* attention) { delete attention; }

void smicqa_eval_options_init(smicqa_eval_options* options) {
  if (options == nullptr) return;
  *options = smicqa_eval_options{};
  smicqa_score_options_init(&options->base);
  options->format = SMICQA_REPORT_JSON;
}

smicqa_status smicqa_evaluate(const smicqa_eval_options* options, const smicqa_backbone* backbone,
                              char** out_report, int* any_aborted) {
  return guarded([&] {
    require(options != nullptr && out_report != nullptr, "null argument");
    require(options->manifest != nullptr, "manifest path missing");
    require(options->metrics != nullptr && options->metric_count > 0, "no metrics given");
    require(options->smic_modes != nullptr && options->smic_mode_count > 0, "no smic modes given");
    *out_report = nullptr;
    const auto manifest =
        smicqa::load_manifest(options->manifest, options->root ? options->root : ".");
    smicqa::BenchmarkOptions bench;
    bench.base = to_config(options->base);
    bench.threads = options->threads;
    for (std::size_t i = 0; i < options->metric_count; ++i) {
      for (std::size_t j = 0; j < options->smic_mode_count; ++j) {
        bench.cells.push_back({to_metric(options->metrics[i]), options->smic_modes[j] != 0});
      }
    }
    const auto report = smicqa::run_benchmark(manifest, bench, backbone_of(backbone));
    const std::string text = options->format == SMICQA_REPORT_CSV ? smicqa::report_to_csv(report)
                                                                   : smicqa::report_to_json(report);
    if (any_aborted) *any_aborted = report.any_aborted() ? 1 : 0;
    *out_report = copy_string(text);
  });
}

smicqa_status smicqa_mic(const double* xs, const double* ys, size_t n, int exact,
                         double bound_exponent, double* out) {
  return guarded([&] {
    require(xs != nullptr && ys != nullptr && out != nullptr, "null argument");
    smicqa::mic::SamplePairs samples(std::vector<double>(xs, xs + n), std::vector<double>(ys, ys + n));
    *out = exact ? smicqa::mic::exact_mic(samples, bound_exponent).value
                 : smicqa::mic::approx_mic(samples, bound_exponent).value;
  });
}

}  // extern "C"
